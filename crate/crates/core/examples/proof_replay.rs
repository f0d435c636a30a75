// Replays the substitutions that reduce the weighted inequality to the
// one-dimensional Bliss inequality, on the extremal and on a random profile.

use sharp_embed::profiles::{extremal_ckn, random_profile};
use sharp_embed::transforms::replay_ckn;
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let (n, q, a) = (5, 3.0, 0.5);
    for (label, f) in [("extremal", extremal_ckn(n, q, a)?), ("random", random_profile(3, 0.2, -3.0)?)] {
        println!("{label}");
        for check in replay_ckn(&f, n, q, a)? {
            println!(
                "  {:<28} lhs {:>22.15e} rhs {:>22.15e} gap {:.1e} {}",
                check.identity_name,
                check.lhs,
                check.rhs,
                check.rel_gap,
                if check.passed() { "ok" } else { "FAILED" }
            );
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

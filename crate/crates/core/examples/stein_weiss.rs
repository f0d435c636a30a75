// The radial Stein–Weiss form: sphere-averaged Newtonian kernel by Monte
// Carlo, the candidate extremal and the bound on random profiles.

use sharp_embed::constants::{stein_weiss_a, stein_weiss_a_printed};
use sharp_embed::functionals::{newtonian_sphere_mean_mc, stein_weiss_radial_ratio};
use sharp_embed::profiles::{extremal_stein_weiss, random_profile};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let (mean, se) = newtonian_sphere_mean_mc(3, 0.5, 2.0, 20_000, 1)?;
    println!("sphere mean of |x−y|^(2−n) at s=0.5, t=2: {mean:.6} ± {se:.1e} (closed form 0.5)");

    let (n, p) = (3, 1.5);
    let a = stein_weiss_a(n, p)?;
    println!("A adopted {a:.12}  printed {:.12}", stein_weiss_a_printed(n, p)?);
    let h = extremal_stein_weiss(n, p)?;
    println!("candidate extremal ratio {:.12}", stein_weiss_radial_ratio(&h, n, p)?.value);
    for seed in 0..3 {
        let g = random_profile(seed, 0.0, -2.5)?;
        println!("random profile {seed}: ratio / A = {:.6}", stein_weiss_radial_ratio(&g, n, p)?.value / a);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

// Prints the sharp constants of a few cases, including the printed forms
// that disagree with the adopted ones.

use sharp_embed::constants::{d_qa, sobolev_constant, EmbeddingCase};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    for n in 3..=6 {
        let q = 2.0 * n as f64 / (n as f64 - 2.0);
        println!("n={n}: D_(q*,0) = {:.12}  Sobolev = {:.12}", d_qa(n, q, 0.0)?, sobolev_constant(n)?);
    }
    let cases = [
        EmbeddingCase::thm2(4, 3.0, 0.25)?,
        EmbeddingCase::bliss(2.0, 4.0)?,
        EmbeddingCase::young(4.0 / 3.0)?,
        EmbeddingCase::stein_weiss(3, 1.5)?,
        EmbeddingCase::thm4(4, 3.0, 6.0, 0.0)?,
    ];
    for case in &cases {
        println!("{} n={} p={} q={} a={}", case.theorem, case.n, case.p, case.q, case.a);
        for entry in case.constant_table()? {
            match entry.printed_value {
                Some(printed) => println!("  {:<6} {:.12}  (printed {printed:.12})", entry.name, entry.adopted_value),
                None => println!("  {:<6} {:.12}", entry.name, entry.adopted_value),
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

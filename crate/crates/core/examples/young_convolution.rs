// The convolution inequality with kernel `e^{−|x|}`: the printed maximizer
// argument against the derived one, and the search for the best constant.

use sharp_embed::constants::{young_a, young_a_printed, young_gamma, young_gamma_printed, EmbeddingCase};
use sharp_embed::functionals::young_ratio;
use sharp_embed::optimizer::{maximize_young, TrialFamily};
use sharp_embed::profiles::{extremal_young, extremal_young_derived};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let p = 1.5;
    println!("A adopted {:.12}  printed {:.12}", young_a(p)?, young_a_printed(p)?);
    println!("gamma adopted {:.12}  printed {:.12}", young_gamma(p)?, young_gamma_printed(p)?);
    println!("ratio at derived argument {:.12}", young_ratio(&extremal_young_derived(p)?, p)?.value);
    println!("ratio at printed argument {:.12}", young_ratio(&extremal_young(p)?, p)?.value);

    let case = EmbeddingCase::young(p)?;
    let res = maximize_young(p, &TrialFamily::parametric(&case)?, 5)?;
    println!("searched maximum {:.12} at {:?}", res.best_value, res.best_params);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

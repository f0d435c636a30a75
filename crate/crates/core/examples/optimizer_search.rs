// Searches parametric and spline trial families for a profile beating the
// sharp constant, and reports how close the best one gets.

use sharp_embed::constants::EmbeddingCase;
use sharp_embed::optimizer::{extremal_profile, minimize_quotient, TrialFamily};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let case = EmbeddingCase::thm2(3, 4.0, 0.25)?;
    for family in [
        TrialFamily::parametric(&case)?,
        TrialFamily::grid_spline(&extremal_profile(&case)?, 8)?,
    ] {
        let res = minimize_quotient(&case, &family, 11)?;
        println!(
            "{:?}: best {:.12} formula {:.12} gap {:.2e} after {} evaluations, restart spread {:.1e}",
            res.family,
            res.best_value,
            res.formula_value,
            res.gap,
            res.evaluations,
            res.restart_spread()
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

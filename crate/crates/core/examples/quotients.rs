// Evaluates the quotients of the weighted inequalities on their extremals
// and on a perturbed profile.

use sharp_embed::functionals::{bliss_quotient, ckn_quotient, hardy_gap, lp_quotient};
use sharp_embed::constants::bliss_k;
use sharp_embed::profiles::{extremal_bliss, extremal_ckn, extremal_radial_p, random_profile};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let f = extremal_ckn(4, 3.0, 0.5)?;
    let rep = ckn_quotient(&f, 4, 3.0, 0.5)?;
    println!("ckn extremal: quotient {:.12}  constant {:.12}  deficit {:.1e}", rep.quotient, rep.sharp_constant, rep.relative_deficit);

    let g = random_profile(7, 0.0, -2.0)?;
    let rep = ckn_quotient(&g, 4, 3.0, 0.5)?;
    println!("random profile: deficit {:.4e} (non-negative)", rep.relative_deficit);
    println!("hardy gap of the random profile: {:.6e}", hardy_gap(&g, 4, 0.5)?);

    let u = extremal_radial_p(3, 1.5, 3.0, 0.5)?;
    let rep = lp_quotient(&u, 3, 1.5, 3.0, 0.5)?;
    println!("L^p extremal deficit {:.1e}", rep.relative_deficit);

    let b = bliss_quotient(&extremal_bliss(2.0, 6.0, 0.5)?, 2.0, 6.0)?;
    println!("Bliss ratio {:.12}  K {:.12}", b.value, bliss_k(2.0, 6.0)?);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

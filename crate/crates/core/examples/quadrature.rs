// Adaptive quadrature on the half-line with an endpoint singularity and
// algebraic decay.

use sharp_embed::quad::{integrate_halfline, integrate_interval, Decay, QuadratureSpec};
use sharp_embed::specfn::{gamma_ratio, GammaRatio};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    // ∫_0^∞ r^{s−1}/(1+r)^{s+t} dr = B(s, t)
    let (s, t) = (0.3, 1.7);
    let spec = QuadratureSpec::default()
        .with_sigma(s - 1.0)
        .with_decay(Decay::Algebraic(1.0 + t))
        .with_rel_tol(1e-12);
    let r = integrate_halfline(|r: f64| r.powf(s - 1.0) / (1.0 + r).powf(s + t), &spec)?;
    let beta = gamma_ratio(&GammaRatio::new(vec![s, t], vec![s + t]))?;
    println!("beta integral {:.15}  exact {beta:.15}  estimate {:.1e}  panels {}", r.value, r.error_estimate, r.subdivisions_used);

    let r = integrate_interval(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &QuadratureSpec::default())?;
    println!("∫_0^π sin = {:.15}", r.value);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

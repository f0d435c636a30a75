// Closed-form extremals, random spline profiles and their serialized form.

use sharp_embed::profiles::{extremal_bliss, extremal_ckn, random_profile, RadialFunction, RadialProfile};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let f = extremal_ckn(3, 4.0, 0.25)?;
    for r in [0.1, 1.0, 10.0] {
        println!("ckn extremal f({r}) = {:.10}  f'({r}) = {:.10}", f.value(r), f.slope(r));
    }
    let a = f.asymptotics();
    println!("ends: r^{} at 0, r^{} at infinity", a.origin, a.tail);

    let g = extremal_bliss(2.0, 4.0, 1.0)?.dilate(2.0)?;
    let json = serde_json::to_string(&g.descriptor()).expect("descriptor serializes");
    println!("dilated Bliss profile: {json}");

    let h = random_profile(42, 0.0, -2.5)?;
    let back = RadialProfile::from_descriptor(&h.descriptor())?;
    println!("random spline at r=1: {:.10} (restored {:.10})", h.value(1.0), back.value(1.0));
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

// Builds a verification report and a small sweep, then prints them in the
// formats the command line writes.

use sharp_embed::constants::{EmbeddingCase, Theorem};
use sharp_embed::report::{read_csv, sweep, verify, write_csv};
use sharp_embed::Result;

pub fn run_example() -> Result<()> {
    let case = EmbeddingCase::bliss(2.0, 4.0)?;
    let rep = verify(&case, 20, 3)?;
    println!(
        "verify bliss(2,4): pass={} extremal deficit {:.1e}, minimum random slack {:.3e}",
        rep.pass, rep.quotient_reports[0].relative_deficit, rep.random_profiles.min_slack
    );

    let grid: Vec<_> = [0.0, 0.1, 0.2, 0.3].iter().map(|&a| (Theorem::Thm2, 3, 2.0, 5.0, a)).collect();
    let rows = sweep(&grid, false, 1);
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    let text = String::from_utf8(csv).expect("csv is utf-8");
    print!("{text}");
    assert_eq!(read_csv(&text)?, rows);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! The `sharp-embed` command line.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure and
//! 2 on a usage or parameter error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::constants::{EmbeddingCase, Theorem};
use crate::error::{Error, Result};
use crate::report::{self, SweepParam, SweepRow};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const THREADS_ENV: &str = "SHARP_EMBED_THREADS";

#[derive(Debug, Parser)]
#[command(name = "sharp-embed", version, about = "Sharp constants for Hardy-Sobolev type embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct Params {
    /// Dimension
    #[arg(long)]
    n: Option<u32>,
    /// Gradient or input exponent
    #[arg(long)]
    p: Option<f64>,
    /// Target exponent
    #[arg(long)]
    q: Option<f64>,
    /// Weight exponent
    #[arg(long)]
    a: Option<f64>,
}

impl Params {
    fn case(&self, theorem: Theorem) -> Result<EmbeddingCase> {
        let case = report::build_case(theorem, self.n, self.p, self.q, self.a)?;
        case.validate_theorem()?;
        Ok(case)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print every constant of a case as JSON
    Constant {
        theorem: Theorem,
        #[command(flatten)]
        params: Params,
    },
    /// Run extremal attainment, random profiles, proof replay and a certificate
    Verify {
        theorem: Theorem,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 100)]
        profiles: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate constants, extremal deficits and optimizer gaps along a grid
    Sweep {
        theorem: Theorem,
        #[command(flatten)]
        params: Params,
        /// Parameter to vary
        #[arg(long)]
        over: SweepParam,
        #[arg(long, requires_all = ["to", "steps"], conflicts_with = "values")]
        from: Option<f64>,
        #[arg(long)]
        to: Option<f64>,
        /// Number of grid points, both ends included
        #[arg(long)]
        steps: Option<usize>,
        /// Explicit comma-separated grid
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Option<Vec<f64>>,
        /// Skip the parametric search
        #[arg(long)]
        no_optimize: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run sharpness certificates over the default grid
    Certify {
        /// Restrict to one theorem
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        theorem: Option<Theorem>,
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Objective evaluations per restart
        #[arg(long)]
        budget: Option<usize>,
        /// Write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json<T: serde::Serialize>(value: &T, out: &Option<PathBuf>) -> Result<()> {
    let mut w = sink(out)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn grid_values(from: Option<f64>, to: Option<f64>, steps: Option<usize>, values: Option<Vec<f64>>) -> Result<Vec<f64>> {
    if let Some(v) = values {
        return Ok(v);
    }
    match (from, to, steps) {
        (Some(lo), Some(hi), Some(k)) => Ok(match k {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
        }),
        _ => Err(Error::Domain("sweep needs --from/--to/--steps or --values".into())),
    }
}

fn sweep_grid(theorem: Theorem, params: &Params, over: SweepParam, values: &[f64]) -> Result<Vec<(Theorem, u32, f64, f64, f64)>> {
    values
        .iter()
        .map(|&v| {
            let mut p = *params;
            match over {
                SweepParam::N => {
                    if v.fract() != 0.0 || v < 1.0 {
                        return Err(Error::Domain(format!("dimension must be a positive integer, got {v}")));
                    }
                    p.n = Some(v as u32);
                }
                SweepParam::P => p.p = Some(v),
                SweepParam::Q => p.q = Some(v),
                SweepParam::A => p.a = Some(v),
            }
            // build_case fills the fixed fields; row-level validation happens in the sweep
            let template = report::build_case(theorem, p.n, p.p, p.q, p.a);
            let (n, pp, q, a) = match template {
                Ok(c) => (c.n, c.p, c.q, c.a),
                Err(_) => (p.n.unwrap_or(1), p.p.unwrap_or(2.0), p.q.unwrap_or(f64::NAN), p.a.unwrap_or(0.0)),
            };
            Ok((theorem, n, pp, q, a))
        })
        .collect()
}

fn run_command(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Constant { theorem, params } => {
            let case = params.case(theorem)?;
            write_json(&report::constant_report(&case)?, &None)?;
            Ok(EXIT_PASS)
        }
        Command::Verify {
            theorem,
            params,
            profiles,
            seed,
            out,
        } => {
            let case = params.case(theorem)?;
            let rep = report::verify(&case, profiles, seed)?;
            write_json(&rep, &out)?;
            if rep.pass {
                Ok(EXIT_PASS)
            } else {
                let failing = serde_json::json!({
                    "quotient_reports": rep.quotient_reports.iter().filter(|r| !r.pass).collect::<Vec<_>>(),
                    "random_profiles": if rep.random_profiles.pass() { None } else { Some(&rep.random_profiles) },
                    "proof_replay": rep.proof_replay.iter().filter(|c| !c.passed()).collect::<Vec<_>>(),
                    "certificates": rep.certificates.iter().filter(|c| !c.pass).collect::<Vec<_>>(),
                });
                eprintln!("verification failed: {failing}");
                Ok(EXIT_FAIL)
            }
        }
        Command::Sweep {
            theorem,
            params,
            over,
            from,
            to,
            steps,
            values,
            no_optimize,
            seed,
            out,
        } => {
            let grid = sweep_grid(theorem, &params, over, &grid_values(from, to, steps, values)?)?;
            let rows: Vec<SweepRow> = report::sweep(&grid, !no_optimize, seed);
            let mut w = sink(&out)?;
            report::write_csv(&rows, &mut w)?;
            w.flush()?;
            Ok(if rows.iter().all(|r| r.status == report::RowStatus::Pass) {
                EXIT_PASS
            } else {
                EXIT_FAIL
            })
        }
        Command::Certify {
            theorem,
            all,
            seed,
            budget,
            out,
        } => {
            let cases: Vec<_> = report::default_grid()
                .into_iter()
                .filter(|c| all || Some(c.theorem) == theorem)
                .collect();
            let rep = report::certify(&cases, seed, budget)?;
            let mut stdout = io::stdout().lock();
            write!(stdout, "{}", report::certificate_table(&rep))?;
            if theorem == Some(Theorem::SteinWeiss) || all {
                let table = report::discrepancy_table(&rep);
                if !table.is_empty() {
                    writeln!(stdout, "\nprinted versus adopted constants")?;
                    write!(stdout, "{table}")?;
                }
            }
            let passed = rep.certificates.iter().filter(|c| c.pass).count();
            writeln!(stdout, "\n{passed}/{} certificates pass", rep.certificates.len())?;
            stdout.flush()?;
            eprintln!("wall time {:.2} s", rep.wall_time);
            if out.is_some() {
                write_json(&rep, &out)?;
            }
            Ok(if rep.pass { EXIT_PASS } else { EXIT_FAIL })
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    configure_threads();
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e @ Error::Domain(_)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAIL
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["sharp-embed", "verify", "thm2", "--n", "3", "--q", "7"]), EXIT_USAGE);
        assert_eq!(run(["sharp-embed", "constant", "thm1", "--q", "3"]), EXIT_USAGE);
        assert_eq!(run(["sharp-embed", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["sharp-embed", "constant", "nope", "--n", "3"]), EXIT_USAGE);
    }

    #[test]
    fn constant_succeeds() {
        assert_eq!(run(["sharp-embed", "constant", "thm2", "--n", "3", "--q", "6", "--a", "0.5"]), EXIT_PASS);
    }

    #[test]
    fn linear_grid_includes_both_ends() {
        let g = grid_values(Some(0.0), Some(1.0), Some(5), None).unwrap();
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(grid_values(Some(0.0), Some(1.0), Some(0), None).unwrap().is_empty());
    }
}

//! Command-line runner: loads a fixture, executes the requested suites, and
//! emits a deterministic text or JSON report.
//!
//! Exit codes: 0 when every checked row passes, 2 when any checked row
//! fails, 1 on load or configuration errors. Report-only and not-evaluated
//! rows never affect the exit code.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nullgeo::fixtures;
use nullgeo::report::{RunConfig, RunReport};
use nullgeo::suites;

#[derive(Parser, Debug)]
#[command(
    name = "nullgeo",
    about = "Residual verification suites for statistical-manifold geometry and lightlike hypersurfaces",
    version
)]
struct Args {
    /// Registry fixture name or path to a fixture TOML file.
    #[arg(long)]
    fixture: String,

    /// Suite to run.
    #[arg(long, default_value = "all")]
    suite: Suite,

    /// Sample points per chart.
    #[arg(long, default_value_t = 64)]
    points: usize,

    /// Identity tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Degeneracy threshold for rank decisions.
    #[arg(long, default_value_t = 1e-10)]
    degen_tol: f64,

    /// PRNG seed for the sample sequence.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output format.
    #[arg(long, default_value = "text")]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,

    /// List the registry fixtures and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Section2,
    Section3,
    Contact,
    Ssi,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list {
        for name in fixtures::registry::names() {
            println!("{name}");
        }
        return ExitCode::SUCCESS;
    }
    match run(&args) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(args: &Args) -> anyhow::Result<bool> {
    let cfg = RunConfig {
        points: args.points,
        tol: args.tol,
        degen_tol: args.degen_tol,
        seed: args.seed,
    };
    let fx = fixtures::load(&args.fixture)?;
    let reports = match args.suite {
        Suite::All => suites::run_all(&fx, &cfg)?,
        Suite::Section2 => vec![suites::run_suite(&fx, "section2", &cfg)?],
        Suite::Section3 => vec![suites::run_suite(&fx, "section3", &cfg)?],
        Suite::Contact => vec![suites::run_suite(&fx, "contact", &cfg)?],
        Suite::Ssi => vec![suites::run_suite(&fx, "ssi", &cfg)?],
    };
    let run_report = RunReport::new(fx.name(), cfg, reports);
    let rendered = match args.format {
        Format::Json => run_report.to_json(),
        Format::Text => run_report.to_text(),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => {
            std::io::stdout().write_all(rendered.as_bytes())?;
        }
    }
    if !run_report.passed() {
        for rep in &run_report.reports {
            for row in rep.failures() {
                eprintln!(
                    "FAIL {}/{}/{}: max residual {:.3e} >= tol {:.1e}",
                    run_report.fixture, rep.suite, row.id, row.max_residual, row.tolerance
                );
            }
        }
    }
    Ok(run_report.passed())
}

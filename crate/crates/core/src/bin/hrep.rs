use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hrep::harness::{parse_matrix, run_suite, run_suite_with_threads, threads_from_env, Format, Suite, SuiteConfig};
use hrep::{Error, Result};

#[derive(Parser)]
#[command(
    name = "hrep",
    version,
    about = "Verification workbench for Heisenberg groups and their lattice representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// group, characters, schrodinger, forms, main-theorem, theta4 or all
    suite: Option<String>,
    #[arg(long)]
    g: Option<usize>,
    #[arg(long)]
    h: Option<usize>,
    /// T = 2M as JSON rows, e.g. [[2,1],[1,2]]
    #[arg(long = "T", value_name = "ROWS")]
    t: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    quad: Option<usize>,
    #[arg(long)]
    rmax: Option<i64>,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file with defaults, overridden by flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// json or text
    #[arg(long)]
    format: Option<String>,
    /// Record runtimes in the report (breaks byte-identical reruns).
    #[arg(long)]
    timings: bool,
}

fn config(a: VerifyArgs) -> Result<SuiteConfig> {
    let mut c = match &a.config {
        Some(p) => SuiteConfig::from_json_file(p)?,
        None => SuiteConfig::default(),
    };
    match (a.suite, &a.config) {
        (Some(s), _) => c.suite = s.parse::<Suite>()?,
        (None, None) => return Err(Error::Config("no suite given".into())),
        _ => {}
    }
    if let Some(g) = a.g {
        c.g = g;
    }
    if let Some(h) = a.h {
        c.h = h;
    }
    if let Some(t) = a.t {
        c.t = Some(parse_matrix(&t)?);
    }
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(t) = a.tol {
        c.tol.residual = t;
    }
    if let Some(q) = a.quad {
        c.quad = q;
    }
    if let Some(r) = a.rmax {
        c.rmax = r;
    }
    if a.out.is_some() {
        c.out = a.out;
    }
    if let Some(f) = a.format {
        c.format = f.parse::<Format>()?;
    }
    c.timings |= a.timings;
    c.validate()?;
    Ok(c)
}

fn run(a: VerifyArgs) -> Result<bool> {
    let cfg = config(a)?;
    let report = match threads_from_env()? {
        Some(n) => run_suite_with_threads(&cfg, n)?,
        None => run_suite(&cfg)?,
    };
    match &cfg.out {
        Some(p) => hrep::harness::emit_report(&report, cfg.format, p)?,
        None => print!("{}", report.render(cfg.format)),
    }
    Ok(report.passed())
}

fn main() -> ExitCode {
    let Command::Verify(args) = Cli::parse().command;
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hrep: {e}");
            ExitCode::from(2)
        }
    }
}

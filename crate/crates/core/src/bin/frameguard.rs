use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use frameguard::report::{emit_csv, emit_text, Report};
use frameguard::scenario::{load_config, run_all, run_norming, selftest, RunMode};
use frameguard::Error;

#[derive(Parser)]
#[command(
    name = "frameguard",
    about = "Per-grade frame bounds and perturbation certificates for graded frame families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// JSON config: one scenario object or an array of them
    config: PathBuf,
    /// Output format
    #[arg(long, value_parser = ["text", "csv"], default_value = "text")]
    format: String,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker count (FRAMEGUARD_JOBS as fallback, default 1)
    #[arg(long)]
    jobs: Option<usize>,
    /// Replace each scenario's seed with a substream of this base seed
    #[arg(long)]
    seed_override: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute per-grade frame bounds of original and perturbed families
    Bounds(RunOpts),
    /// Run the requested perturbation certifiers and report soundness
    Certify(RunOpts),
    /// Build a norming-functional frame from seeded samples and report coverage
    ConstructNorming(RunOpts),
    /// Oracle agreement suite: grid suprema vs singular-value path
    Selftest,
}

fn jobs_of(opts: &RunOpts) -> usize {
    opts.jobs
        .or_else(|| {
            std::env::var("FRAMEGUARD_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1)
        .max(1)
}

fn emit(opts: &RunOpts, report: &Report) -> std::io::Result<()> {
    let body = match opts.format.as_str() {
        "csv" => emit_csv(report),
        _ => emit_text(report),
    };
    match &opts.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(opts: &RunOpts, mode: RunMode) -> Result<i32, Error> {
    let configs = load_config(&opts.config)?;
    let report = run_all(&configs, mode, jobs_of(opts), opts.seed_override)?;
    emit(opts, &report)?;
    Ok(report.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Bounds(opts) => run(&opts, RunMode::BoundsOnly),
        Command::Certify(opts) => run(&opts, RunMode::Certify),
        Command::ConstructNorming(opts) => {
            let configs = load_config(&opts.config)?;
            let mut body = String::new();
            for (i, cfg) in configs.iter().enumerate() {
                body.push_str(&format!("scenario {i}\n"));
                body.push_str(&run_norming(cfg)?);
            }
            match &opts.out {
                Some(path) => std::fs::write(path, body)?,
                None => print!("{body}"),
            }
            Ok(0)
        }
        Command::Selftest => {
            let (body, ok) = selftest()?;
            print!("{body}");
            Ok(if ok { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

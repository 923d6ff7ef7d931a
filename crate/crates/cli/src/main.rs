use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpbo_cli::{report, run_experiment, CliError, ExperimentConfig, ReportKind, ReportOptions, OUT_ENV};

#[derive(Parser)]
#[command(name = "gpbo", version, about = "Bayesian optimisation experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) the grid described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = OUT_ENV, default_value = "gpbo-out")]
        out: PathBuf,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
        /// Continue an existing experiment, skipping completed runs.
        #[arg(long)]
        resume: bool,
    },
    /// Summarise the records of an experiment directory.
    Report {
        #[arg(long, env = OUT_ENV, default_value = "gpbo-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "table")]
        kind: ReportKind,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Training points per run for the nrmse study.
        #[arg(long, default_value_t = 100)]
        train: usize,
        /// Test points per run for the nrmse study.
        #[arg(long, default_value_t = 1000)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Run {
            config,
            out,
            jobs,
            resume,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            let summary = run_experiment(&cfg, &out, jobs, resume)?;
            println!(
                "{} runs executed, {} skipped, {} failed",
                summary.executed,
                summary.skipped,
                summary.failed.len()
            );
            for f in &summary.failed {
                eprintln!("failed: {f}");
            }
            Ok(if summary.failed.is_empty() { 0 } else { 1 })
        }
        Command::Report {
            out,
            kind,
            alpha,
            train,
            test,
            seed,
        } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {alpha}")));
            }
            let outcome = report(
                &out,
                &ReportOptions {
                    kind,
                    alpha,
                    train,
                    test,
                    seed,
                },
            )?;
            for m in &outcome.missing {
                eprintln!("warning: missing run {m}");
            }
            for f in &outcome.files {
                println!("{}", f.display());
            }
            Ok(0)
        }
    }
}

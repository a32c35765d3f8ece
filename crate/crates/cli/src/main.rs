use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use qap_harness::series::ROLLING_WINDOW;
use qap_harness::{
    emit_series, oracle, regenerate_reports, run_experiment, ExperimentConfig, RunRecord,
};

/// Quadratic assignment benchmark harness.
#[derive(Parser)]
#[command(name = "qap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured (instance, algorithm, replication) cell.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed; overrides `seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Also emit every cost column halved.
        #[arg(long)]
        half_count: bool,
        /// Read the first matrix of each instance as distances.
        #[arg(long)]
        swap_matrices: bool,
    },
    /// Rebuild the reports of a run directory from its trace files.
    Report {
        dir: PathBuf,
        /// Where to write the reports; defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a small instance exactly by enumeration.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        half_count: bool,
        #[arg(long)]
        swap_matrices: bool,
    },
    /// Write plot series for one trace file.
    Series {
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = ROLLING_WINDOW)]
        window: usize,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            workers,
            half_count,
            swap_matrices,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(workers) = workers {
                cfg.workers = workers;
            }
            cfg.half_count |= half_count;
            cfg.swap_matrices |= swap_matrices;
            let summary = run_experiment(&cfg)?;
            println!(
                "{} cells, {} failed; results in {}",
                summary.cells,
                summary.failures.len(),
                summary.out_dir.display()
            );
            Ok(exit_for(summary.failures.is_empty()))
        }
        Command::Report { dir, out } => {
            let out = out.unwrap_or_else(|| dir.clone());
            let summary = regenerate_reports(&dir, &out)?;
            for p in &summary.problems {
                eprintln!("warning: {p}");
            }
            println!(
                "{} report rows written to {}",
                summary.groups,
                out.display()
            );
            Ok(exit_for(summary.problems.is_empty()))
        }
        Command::Oracle {
            instance,
            half_count,
            swap_matrices,
        } => {
            let result = oracle(&instance, swap_matrices, half_count)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Series { trace, out, window } => {
            let rec = RunRecord::read(&trace)?;
            let files = emit_series(&rec, &out, window).context("writing series")?;
            for p in [files.convergence, files.lambda, files.variance] {
                println!("{}", p.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn exit_for(clean: bool) -> ExitCode {
    if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

//! `selftrain` — experiment harness for imbalanced semi-supervised learning.
//!
//! Exit codes: 0 success, 1 configuration errors, 2 run failures (a failed
//! arm, a broken input file, or a mismatched comparison).

mod compare_cmd;
mod config;
mod data;
mod dedup_cmd;
mod explain_cmd;
mod report;
mod run_cmd;
mod sweep_cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use selftrain::error::Error;

#[derive(Parser)]
#[command(
    name = "selftrain",
    version,
    about = "Class-rebalancing self-training experiments: run arms, sweep alpha, compare reports, explain predictions, deduplicate corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (variant, alpha, seed) arm and write report.json plus
    /// per-run ROC curves, generation logs, and attribution heatmaps.
    Run {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output directory for report.json, runs/, and explain/.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print generation-1 pseudo-label selection counts per (variant, alpha).
    Sweep {
        /// Experiment config (JSON) with at least two alphas.
        #[arg(long)]
        config: PathBuf,
    },
    /// Diff two report.json files: median per-seed deltas (B − A) and win counts.
    Compare {
        /// Baseline report.json (A).
        report_a: PathBuf,
        /// Comparison report.json (B).
        report_b: PathBuf,
    },
    /// Render per-class attribution heatmaps for test instances.
    Explain {
        /// Experiment config (JSON) with `output` and an `explain` section.
        #[arg(long)]
        config: PathBuf,
        /// Test-split row to explain (overrides the config's instance list).
        #[arg(long)]
        instance: Option<usize>,
    },
    /// Remove duplicated training files and train→test leaks from a corpus.
    Dedup {
        /// CSV manifest with header `set_id,file_id,path`.
        #[arg(long)]
        manifest: PathBuf,
        /// Also write removed.csv, cleaned.csv, and summary.txt here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => run_cmd::run(&config, &out),
        Command::Sweep { config } => sweep_cmd::sweep(&config),
        Command::Compare { report_a, report_b } => compare_cmd::compare(&report_a, &report_b),
        Command::Explain { config, instance } => explain_cmd::explain_command(&config, instance),
        Command::Dedup { manifest, out } => dedup_cmd::dedup(&manifest, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::ConfigError(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

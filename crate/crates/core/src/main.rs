use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sensornet::harness::{self, Kind, RunOptions};

/// Sensor-group outbreak detection experiments.
#[derive(Parser, Debug)]
#[command(name = "sensornet", version)]
struct Cli {
    /// Experiment kind.
    #[arg(value_enum)]
    kind: Kind,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Root random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "SENSORNET_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = RunOptions {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
    };
    match harness::run(cli.kind, &opts) {
        Ok(outcome) => {
            eprintln!(
                "sensornet {}: wrote {} files to {} in {:.2}s",
                cli.kind,
                outcome.manifest.outputs.len() + 1,
                outcome.out_dir.display(),
                outcome.manifest.wall_time_seconds
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("sensornet {}: {e}", cli.kind);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

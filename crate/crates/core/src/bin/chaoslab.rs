//! `chaoslab run | validate | list-experiments`.
//!
//! Exit codes: 0 when every declared band passed, 1 when the run finished
//! with band failures, 2 on configuration or runtime errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaoslab::experiment::{run, ExperimentConfig, RunOptions, KINDS};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "chaoslab", version, about = "Monte Carlo verification sweeps for Poisson U-statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, env = "CHAOSLAB_WORKERS")]
        workers: Option<usize>,
        /// Output directory; falls back to `output_dir` in the config.
        #[arg(long, env = "CHAOSLAB_OUT")]
        out: Option<PathBuf>,
        #[arg(long)]
        overwrite: bool,
        #[arg(long)]
        keep_partial: bool,
    },
    /// Check a config and print warnings about theorem hypotheses.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the available experiment kinds.
    ListExperiments,
}

fn load(path: &Path, seed: Option<u64>) -> chaoslab::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListExperiments => {
            for (kind, about) in KINDS {
                println!("{kind:<18} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match load(&config, None) {
            Ok(cfg) => {
                let findings = cfg.findings();
                for f in &findings {
                    println!("warning: {}: {}", f.field, f.message);
                }
                if findings.is_empty() {
                    println!("ok: {} config is consistent with the theorem hypotheses", cfg.experiment.kind());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
        Command::Run { config, seed, workers, out, overwrite, keep_partial } => {
            if let Some(w) = workers {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
                    eprintln!("error: worker pool: {e}");
                    return ExitCode::from(2);
                }
            }
            let cfg = match load(&config, seed) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            for f in cfg.findings() {
                eprintln!("warning: {}: {}", f.field, f.message);
            }
            let dir = out.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("chaoslab-out").join(cfg.experiment.kind()));
            match run(&cfg, &dir, RunOptions { overwrite, keep_partial }) {
                Ok(report) => {
                    for b in &report.bands {
                        let status = if b.passed { "PASS" } else { "FAIL" };
                        println!("{status} {:<32} value={:<12.6} band=[{}, {}]", b.name, b.value, b.lo, b.hi);
                    }
                    println!("outputs in {}", report.out_dir.display());
                    if report.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

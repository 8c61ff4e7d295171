use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{execute, Band, Outcome};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Replace an existing output directory.
    pub overwrite: bool,
    /// Leave `<out>.partial` in place when writing fails.
    pub keep_partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub out_dir: PathBuf,
    pub raw_csv: PathBuf,
    pub summary_csv: PathBuf,
    pub summary_json: PathBuf,
    pub plot_files: Vec<PathBuf>,
    pub bands: Vec<Band>,
    pub passed: bool,
}

#[derive(Serialize)]
struct SummaryRow {
    n_or_lambda: f64,
    t: Option<f64>,
    mean: f64,
    variance: f64,
    variance_se: f64,
    w1: Option<f64>,
    fourth_gap: Option<f64>,
    fourth_gap_se: Option<f64>,
}

#[derive(Serialize)]
struct PlotRow {
    x: f64,
    y: f64,
    y_err: f64,
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn partial_dir(dir: &Path) -> PathBuf {
    let mut name = dir.file_name().map(|n| n.to_os_string()).unwrap_or_else(|| "out".into());
    name.push(".partial");
    dir.with_file_name(name)
}

fn check_target(dir: &Path, opts: RunOptions) -> Result<()> {
    if dir.exists() && !opts.overwrite {
        return Err(Error::Config { field: "output_dir".into(), reason: format!("{} exists (pass --overwrite)", dir.display()) });
    }
    Ok(())
}

/// Writes every file into `<dir>.partial` and renames it to `dir` once complete.
pub fn write_outcome(outcome: &Outcome, cfg: &ExperimentConfig, dir: &Path, opts: RunOptions) -> Result<ExperimentReport> {
    check_target(dir, opts)?;
    let tmp = partial_dir(dir);
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    let result = write_files(outcome, cfg, &tmp);
    if let Err(e) = result {
        if !opts.keep_partial {
            let _ = fs::remove_dir_all(&tmp);
        }
        return Err(e);
    }
    if dir.exists() {
        fs::remove_dir_all(dir)?;
    }
    fs::rename(&tmp, dir)?;
    let plot_files = outcome.plots.iter().map(|p| dir.join(format!("plot_{}.csv", p.name))).collect();
    Ok(ExperimentReport {
        out_dir: dir.to_path_buf(),
        raw_csv: dir.join("raw.csv"),
        summary_csv: dir.join("summary.csv"),
        summary_json: dir.join("summary.json"),
        plot_files,
        bands: outcome.summary.bands.clone(),
        passed: outcome.summary.passed,
    })
}

fn write_files(outcome: &Outcome, cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    write_csv(&dir.join("raw.csv"), &outcome.raw)?;
    write_csv(
        &dir.join("summary.csv"),
        outcome.summary.points.iter().map(|p| SummaryRow {
            n_or_lambda: p.scale,
            t: p.t,
            mean: p.mean,
            variance: p.variance,
            variance_se: p.variance_se,
            w1: p.w1,
            fourth_gap: p.fourth_gap,
            fourth_gap_se: p.fourth_gap_se,
        }),
    )?;
    let mut json = serde_json::to_string_pretty(&outcome.summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;
    for p in &outcome.plots {
        write_csv(&dir.join(format!("plot_{}.csv", p.name)), p.rows.iter().map(|&(x, y, y_err)| PlotRow { x, y, y_err }))?;
    }
    Ok(())
}

/// Validates, runs and writes one experiment.
pub fn run(cfg: &ExperimentConfig, dir: &Path, opts: RunOptions) -> Result<ExperimentReport> {
    cfg.validate()?;
    check_target(dir, opts)?;
    let outcome = execute(cfg)?;
    write_outcome(&outcome, cfg, dir, opts)
}

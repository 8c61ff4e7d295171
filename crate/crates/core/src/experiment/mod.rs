//! Configuration-driven sweeps with CSV, JSON and plot-data outputs.

mod config;
mod output;
mod run;

pub use config::{default_mark_alpha, ExperimentConfig, ExperimentSpec, Finding, DEFAULT_TAIL_MARGIN, KINDS};
pub use output::{run, write_outcome, ExperimentReport, RunOptions};
pub use run::{
    execute, Band, Outcome, PlotSeries, PointSummary, Provenance, RawRow, Summary, BAND_SIGMAS, BOOLEAN_EDGE_ALLOWANCE, EXACT_RELATIVE,
    RATE_SLOPE_BAND, SCHEMA_VERSION, SECOND_MOMENT_RELATIVE, THIRD_MOMENT_RELATIVE, VARIANCE_SLOPE_TOLERANCE, W1_CONSISTENCY_LEVEL,
};

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry_apps::{PatternGraph, Phi, Regime, RegimeSpec};
use crate::point_process::MarkDistribution;

/// Tail margin used for the default power-law mark exponent `4 d + 1.5 + margin`.
pub const DEFAULT_TAIL_MARGIN: f64 = 0.1;

fn config_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config { field: field.into(), reason: reason.into() }
}

fn one() -> f64 {
    1.0
}
fn two() -> usize {
    2
}
fn three() -> usize {
    3
}
fn default_pattern() -> String {
    "complete:2".into()
}
fn default_order() -> usize {
    20
}
fn default_limit_draws() -> usize {
    1_000_000
}
fn default_budget() -> u64 {
    200_000
}
fn default_draws() -> usize {
    20
}
fn default_grid_nodes() -> usize {
    64
}
fn default_true() -> bool {
    true
}
fn default_mean_check() -> f64 {
    200.0
}
fn default_tail_eps() -> f64 {
    DEFAULT_TAIL_MARGIN
}

/// Top-level experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub replications: usize,
    /// lambda or n values, strictly increasing.
    pub grid: Vec<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub experiment: ExperimentSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExperimentSpec {
    /// Induced-subgraph counts of a poissonized binomial sample of size `n`
    /// on the unit-volume cube.
    SubgraphRegimes {
        regime: Regime,
        #[serde(default = "one_usize")]
        d: usize,
        #[serde(default = "default_pattern")]
        pattern: String,
        #[serde(default = "default_true")]
        check_w1_rate: bool,
    },
    /// Boolean-model edge mass with `phi = |x|^beta` and power-law radii on
    /// a window of volume `lambda`.
    BooleanModel {
        // in d = 2 the finite-window edge loss at lambda = 200 is ~14%
        #[serde(default = "one_usize")]
        d: usize,
        #[serde(default = "one")]
        beta: f64,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default = "one")]
        cutoff: f64,
        #[serde(default = "default_order")]
        quadrature_order: usize,
        /// Grid points at or above this intensity carry the mean check.
        #[serde(default = "default_mean_check")]
        mean_check_from: f64,
        #[serde(default = "default_true")]
        check_w1_rate: bool,
    },
    /// `k`-simplex counts with power-law radii on `[-lambda^(1/d), lambda^(1/d)]^d`.
    TelecomSimplex {
        #[serde(default = "two")]
        d: usize,
        #[serde(default = "three")]
        k: usize,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default = "one")]
        cutoff: f64,
        #[serde(default = "default_tail_eps")]
        tail_eps: f64,
        #[serde(default = "default_true")]
        check_w1_rate: bool,
    },
    /// Sign kernel on `[-1, 1]` against the limit `2 (xi^2 - 1)`.
    GeometricLimit {
        #[serde(default = "default_limit_draws")]
        limit_draws: usize,
    },
    /// Normalized contraction bound of the edge-count pair on `[-w, w]`,
    /// Monte Carlo against grid quadrature.
    B3Diagnostics {
        #[serde(default = "half")]
        t: f64,
        #[serde(default = "one")]
        half_width: f64,
        #[serde(default = "default_budget")]
        budget: u64,
        #[serde(default = "default_grid_nodes")]
        grid_nodes: usize,
    },
    /// Rescaling identities on random admissible parameters and the chaos
    /// variance identity of the constant and edge kernels.
    KernelIdentities {
        #[serde(default = "default_draws")]
        draws: usize,
        #[serde(default = "default_budget")]
        budget: u64,
        #[serde(default = "half")]
        t: f64,
    },
}

fn one_usize() -> usize {
    1
}
fn half() -> f64 {
    0.5
}

/// A warning about parameters outside the hypotheses of the limit theorems.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub field: String,
    pub message: String,
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::SubgraphRegimes { .. } => "subgraph_regimes",
            Self::BooleanModel { .. } => "boolean_model",
            Self::TelecomSimplex { .. } => "telecom_simplex",
            Self::GeometricLimit { .. } => "geometric_limit",
            Self::B3Diagnostics { .. } => "b3_diagnostics",
            Self::KernelIdentities { .. } => "kernel_identities",
        }
    }
}

pub const KINDS: [(&str, &str); 6] = [
    ("subgraph_regimes", "disk-graph induced subgraph counts under the R1/R2/R3 scalings"),
    ("boolean_model", "boolean-model weighted edge mass with power-law radii"),
    ("telecom_simplex", "k-simplex coverage counts with power-law radii"),
    ("geometric_limit", "sign-kernel statistic against the limit 2(xi^2 - 1)"),
    ("b3_diagnostics", "normalized contraction bound of the edge-count chaos pair"),
    ("kernel_identities", "rescaling identities and the chaos variance identity"),
];

/// Default power-law exponent `4 d + 1.5 + margin`.
pub fn default_mark_alpha(d: usize) -> f64 {
    4.0 * d as f64 + 1.5 + DEFAULT_TAIL_MARGIN
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| format!("bytes {}..{}", s.start, s.end)).unwrap_or_else(|| "config".into());
            config_err(field, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Rejects configurations that violate a module precondition.
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(config_err("scale grid", "must be non-empty"));
        }
        if self.grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) || self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("scale grid", "must be positive and strictly increasing"));
        }
        if self.replications < 2 {
            return Err(config_err("replications", "must be at least 2"));
        }
        match &self.experiment {
            ExperimentSpec::SubgraphRegimes { regime, d, pattern, .. } => {
                let p = PatternGraph::parse(pattern).map_err(|e| config_err("experiment.pattern", e.to_string()))?;
                if !(1..=crate::point_process::MAX_DIM).contains(d) {
                    return Err(config_err("experiment.d", format!("must lie in 1..={}", crate::point_process::MAX_DIM)));
                }
                let spec = RegimeSpec { regime: *regime, k: p.order(), d: *d };
                crate::geometry_apps::regime_sequence(&spec, &self.grid).map_err(|e| config_err("experiment.regime", e.to_string()))?;
            }
            ExperimentSpec::BooleanModel { d, beta, cutoff, quadrature_order, .. } => {
                check_dim(*d)?;
                self.marks()?;
                if !beta.is_finite() {
                    return Err(config_err("experiment.beta", "must be finite"));
                }
                if *cutoff < 1.0 {
                    return Err(config_err("experiment.cutoff", "must be at least 1"));
                }
                if *quadrature_order < 2 {
                    return Err(config_err("experiment.quadrature_order", "must be at least 2"));
                }
            }
            ExperimentSpec::TelecomSimplex { d, k, tail_eps, .. } => {
                check_dim(*d)?;
                self.marks()?;
                if !(2..=6).contains(k) {
                    return Err(config_err("experiment.k", "must lie in 2..=6"));
                }
                if !(*tail_eps > 0.0) {
                    return Err(config_err("experiment.tail_eps", "must be positive"));
                }
            }
            ExperimentSpec::GeometricLimit { limit_draws } => {
                if *limit_draws < 2 {
                    return Err(config_err("experiment.limit_draws", "must be at least 2"));
                }
            }
            ExperimentSpec::B3Diagnostics { t, half_width, budget, grid_nodes } => {
                if !(*t > 0.0 && *half_width > 0.0) {
                    return Err(config_err("experiment.t", "t and half_width must be positive"));
                }
                if *budget < 2 || *grid_nodes < 1 {
                    return Err(config_err("experiment.budget", "budget >= 2 and grid_nodes >= 1 required"));
                }
                if self.grid.len() < 4 {
                    return Err(config_err("scale grid", "the rate fit needs at least 4 points"));
                }
            }
            ExperimentSpec::KernelIdentities { draws, budget, t } => {
                if *draws == 0 || *budget < 2 || !(*t > 0.0) {
                    return Err(config_err("experiment.draws", "draws >= 1, budget >= 2 and t > 0 required"));
                }
            }
        }
        Ok(())
    }

    /// Mark law of the marked experiments.
    pub fn marks(&self) -> Result<MarkDistribution> {
        let (d, alpha, cutoff) = match &self.experiment {
            ExperimentSpec::BooleanModel { d, alpha, cutoff, .. } | ExperimentSpec::TelecomSimplex { d, alpha, cutoff, .. } => {
                (*d, *alpha, *cutoff)
            }
            _ => return Ok(MarkDistribution::None),
        };
        MarkDistribution::power_law(alpha.unwrap_or_else(|| default_mark_alpha(d)), cutoff)
            .map_err(|e| config_err("experiment.alpha", e.to_string()))
    }

    /// Parameter combinations outside the hypotheses of the limit theorems.
    /// Never an error.
    pub fn findings(&self) -> Vec<Finding> {
        let mut out = Vec::new();
        let marks = self.marks().ok();
        match (&self.experiment, marks) {
            (ExperimentSpec::BooleanModel { d, beta, .. }, Some(nu @ MarkDistribution::PowerLaw { alpha, .. })) => {
                let need = 2.0 * (beta + *d as f64) + 1.0;
                if alpha <= need {
                    out.push(Finding {
                        field: "experiment.alpha".into(),
                        message: format!("alpha = {alpha} <= 2(beta + d) + 1 = {need}: the edge-mass variance limit is not guaranteed"),
                    });
                }
                if crate::geometry_apps::boolean_mean(Phi::Power { beta: *beta }, &nu, *d, 8).is_err() {
                    out.push(Finding { field: "experiment.beta".into(), message: "the mean density integral diverges".into() });
                }
            }
            (ExperimentSpec::TelecomSimplex { d, tail_eps, .. }, Some(MarkDistribution::PowerLaw { alpha, .. })) => {
                let need = 4.0 * *d as f64 + tail_eps;
                if alpha - 1.0 <= need {
                    out.push(Finding {
                        field: "experiment.alpha".into(),
                        message: format!("alpha - 1 = {} <= 4d + eps = {need}: the radius tail moment is infinite", alpha - 1.0),
                    });
                }
            }
            _ => {}
        }
        if self.replications < 2000
            && !matches!(self.experiment, ExperimentSpec::B3Diagnostics { .. } | ExperimentSpec::KernelIdentities { .. })
        {
            out.push(Finding {
                field: "replications".into(),
                message: format!("{} replications is below the 2000 used by the variance-slope bands", self.replications),
            });
        }
        out
    }
}

fn check_dim(d: usize) -> Result<()> {
    if !(1..=crate::point_process::MAX_DIM).contains(&d) {
        return Err(config_err("experiment.d", format!("must lie in 1..={}", crate::point_process::MAX_DIM)));
    }
    Ok(())
}

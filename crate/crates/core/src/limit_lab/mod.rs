//! Distances to the Gaussian, fourth-moment gaps, rate fits and the
//! moment check of a non-central limit.

mod fits;
mod geometric;
mod wasserstein;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use fits::{fourth_moment_gap, rate_fit, variance_asymptotics_check, RateFit, VarianceCheck};
pub use geometric::{geometric_limit_check, sample_limit_law, scaled_sign_sample, sign_statistic, GeometricLimitReport, MomentPoint};
pub use wasserstein::{standardize, wasserstein1_to_std_gaussian};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMeta {
    /// lambda or n.
    pub scale: f64,
    pub statistic: String,
    pub seed: u64,
}

/// One value per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub values: Vec<f64>,
    pub meta: SampleMeta,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, meta: SampleMeta) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(invalid("samples", format!("non-finite value {v}")));
        }
        Ok(Self { values, meta })
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Unbiased sample variance and its standard error
    /// `sqrt((m4 - s^4 (n - 3)/(n - 1)) / n)`.
    pub fn variance(&self) -> Result<(f64, f64)> {
        let n = self.values.len();
        if n < 4 {
            return Err(invalid("samples", "need at least 4 values for a variance error"));
        }
        let m = self.mean();
        let nf = n as f64;
        let s2 = self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (nf - 1.0);
        let m4 = self.values.iter().map(|v| (v - m).powi(4)).sum::<f64>() / nf;
        let se = ((m4 - s2 * s2 * (nf - 3.0) / (nf - 1.0)) / nf).max(0.0).sqrt();
        Ok((s2, se))
    }

    /// W1 distance of the empirically standardized sample to `N(0, 1)`.
    pub fn w1_standardized(&self) -> Result<f64> {
        wasserstein1_to_std_gaussian(&standardize(&self.values)?)
    }

    pub fn fourth_moment_gap(&self) -> Result<(f64, f64)> {
        fourth_moment_gap(&standardize(&self.values)?)
    }
}

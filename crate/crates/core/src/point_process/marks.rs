use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Law of the scalar mark attached to each point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkDistribution {
    /// Unmarked process.
    None,
    Constant {
        value: f64,
    },
    /// Density `(alpha - 1) cutoff^(alpha - 1) r^(-alpha)` on `[cutoff, inf)`.
    PowerLaw {
        alpha: f64,
        cutoff: f64,
    },
    /// Finite law `P(mark = values[i]) = probs[i]`.
    Empirical {
        values: Vec<f64>,
        probs: Vec<f64>,
    },
}

impl MarkDistribution {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn power_law(alpha: f64, cutoff: f64) -> Result<Self> {
        let m = Self::PowerLaw { alpha, cutoff };
        m.validate()?;
        Ok(m)
    }

    pub fn empirical(values: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        let m = Self::Empirical { values, probs };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::None => Ok(()),
            Self::Constant { value } if value.is_finite() => Ok(()),
            Self::Constant { value } => Err(invalid("marks.value", format!("not finite: {value}"))),
            Self::PowerLaw { alpha, cutoff } => {
                if !(alpha.is_finite() && *alpha > 1.0) {
                    return Err(invalid("marks.alpha", format!("must exceed 1, got {alpha}")));
                }
                if !(cutoff.is_finite() && *cutoff >= 1.0) {
                    return Err(invalid("marks.cutoff", format!("must be >= 1, got {cutoff}")));
                }
                Ok(())
            }
            Self::Empirical { values, probs } => {
                if values.is_empty() || values.len() != probs.len() {
                    return Err(invalid("marks.probs", "values and probs must be non-empty and of equal length"));
                }
                if values.iter().any(|v| !v.is_finite()) || probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(invalid("marks.probs", "entries must be finite, probabilities non-negative"));
                }
                let total: f64 = probs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(invalid("marks.probs", format!("must sum to 1, got {total}")));
                }
                Ok(())
            }
        }
    }

    pub fn is_marked(&self) -> bool {
        !matches!(self, Self::None)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        match self {
            Self::None => None,
            Self::Constant { value } => Some(*value),
            Self::PowerLaw { .. } => Some(self.quantile(rng.random::<f64>())),
            Self::Empirical { values, probs } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return Some(*v);
                    }
                }
                values.last().copied()
            }
        }
    }

    /// Inverse distribution function on `u in [0, 1)`; for the power law this
    /// is `cutoff (1 - u)^(-1/(alpha - 1))`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::None => f64::NAN,
            Self::Constant { value } => *value,
            Self::PowerLaw { alpha, cutoff } => cutoff * (1.0 - u).powf(-1.0 / (alpha - 1.0)),
            Self::Empirical { values, probs } => {
                let mut acc = 0.0;
                for (v, p) in values.iter().zip(probs) {
                    acc += p;
                    if u < acc {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
        }
    }

    /// Tail function `P(mark > r)`.
    pub fn tail(&self, r: f64) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Constant { value } => f64::from(*value > r),
            Self::PowerLaw { alpha, cutoff } => {
                if r < *cutoff {
                    1.0
                } else {
                    (r / cutoff).powf(1.0 - alpha)
                }
            }
            Self::Empirical { values, probs } => values.iter().zip(probs).filter(|(v, _)| **v > r).map(|(_, p)| p).sum(),
        }
    }

    /// Density of an absolutely continuous mark law (power law only).
    pub fn density(&self, r: f64) -> Option<f64> {
        match self {
            Self::PowerLaw { alpha, cutoff } => {
                Some(if r < *cutoff { 0.0 } else { (alpha - 1.0) * cutoff.powf(alpha - 1.0) * r.powf(-alpha) })
            }
            _ => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Self::None => f64::NAN,
            Self::Constant { value } => *value,
            Self::PowerLaw { alpha, cutoff } => {
                if *alpha > 2.0 {
                    cutoff * (alpha - 1.0) / (alpha - 2.0)
                } else {
                    f64::INFINITY
                }
            }
            Self::Empirical { values, probs } => values.iter().zip(probs).map(|(v, p)| v * p).sum(),
        }
    }

    /// Quadrature nodes `(mark, weight)` representing the law: atoms for
    /// discrete laws, mapped interior nodes of `rule` for the power law.
    pub(crate) fn nodes(&self, unit_nodes: &[(f64, f64)]) -> Vec<(Option<f64>, f64)> {
        match self {
            Self::None => vec![(None, 1.0)],
            Self::Constant { value } => vec![(Some(*value), 1.0)],
            Self::Empirical { values, probs } => values.iter().zip(probs).map(|(v, p)| (Some(*v), *p)).collect(),
            Self::PowerLaw { .. } => unit_nodes.iter().map(|(u, w)| (Some(self.quantile(*u)), *w)).collect(),
        }
    }
}

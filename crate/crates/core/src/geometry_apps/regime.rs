//! Sparse, dense and thermodynamic scalings of the disk-graph radius.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Regime {
    /// `t = n^(-(1 + delta)/d)`: `n t^d -> 0`, `n^k t^(d(k-1)) -> inf`.
    R1 { delta: f64 },
    /// `t = n^(-beta/d)`, `beta in (0, 1)`: `n t^d -> inf`.
    R2 { beta: f64 },
    /// `t = (c/n)^(1/d)`: `n t^d = c`.
    R3 { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    #[serde(flatten)]
    pub regime: Regime,
    /// Pattern order.
    pub k: usize,
    pub d: usize,
}

impl RegimeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(invalid("regime.k", format!("must be at least 2, got {}", self.k)));
        }
        if self.d == 0 {
            return Err(invalid("regime.d", "must be positive"));
        }
        match self.regime {
            Regime::R1 { delta } => {
                let cap = 1.0 / (self.k - 1) as f64;
                if !(delta > 0.0 && delta < cap) {
                    return Err(invalid("regime.delta", format!("need 0 < delta < 1/(k-1) = {cap}, got {delta}")));
                }
            }
            Regime::R2 { beta } => {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(invalid("regime.beta", format!("need 0 < beta < 1, got {beta}")));
                }
            }
            Regime::R3 { c } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(invalid("regime.c", format!("must be positive, got {c}")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.regime {
            Regime::R1 { .. } => "R1",
            Regime::R2 { .. } => "R2",
            Regime::R3 { .. } => "R3",
        }
    }

    pub fn radius(&self, n: f64) -> f64 {
        let d = self.d as f64;
        match self.regime {
            Regime::R1 { delta } => n.powf(-(1.0 + delta) / d),
            Regime::R2 { beta } => n.powf(-beta / d),
            Regime::R3 { c } => (c / n).powf(1.0 / d),
        }
    }

    /// Predicted order of magnitude of the variance of the count:
    /// `n^k t^(d(k-1))`, `n^(2k-1) t^(d(2k-2))` and `n` respectively.
    pub fn variance_scale(&self, n: f64, t: f64) -> f64 {
        let (k, td) = (self.k as i32, t.powi(self.d as i32));
        match self.regime {
            Regime::R1 { .. } => n.powi(k) * td.powi(k - 1),
            Regime::R2 { .. } => n.powi(2 * k - 1) * td.powi(2 * k - 2),
            Regime::R3 { .. } => n,
        }
    }
}

/// `(n, t_n)` along an increasing grid, after checking that the defining
/// limits move the right way between the grid endpoints.
pub fn regime_sequence(spec: &RegimeSpec, n_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    if n_grid.is_empty() {
        return Err(invalid("scale grid", "must be non-empty"));
    }
    if n_grid.iter().any(|n| !(n.is_finite() && *n > 0.0)) || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("scale grid", "must be positive and strictly increasing"));
    }
    let seq: Vec<(f64, f64)> = n_grid.iter().map(|&n| (n, spec.radius(n))).collect();
    let (first, last) = (seq[0], seq[seq.len() - 1]);
    let occupancy = |(n, t): (f64, f64)| n * t.powi(spec.d as i32);
    let ok = match spec.regime {
        Regime::R1 { .. } => {
            let copies = |(n, t): (f64, f64)| n.powi(spec.k as i32) * t.powi((spec.d * (spec.k - 1)) as i32);
            seq.len() == 1 || (occupancy(last) < occupancy(first) && copies(last) > copies(first))
        }
        Regime::R2 { .. } => seq.len() == 1 || occupancy(last) > occupancy(first),
        Regime::R3 { c } => seq.iter().all(|&p| (occupancy(p) - c).abs() <= 1e-9 * c),
    };
    if !ok {
        return Err(invalid("regime", format!("{} limits fail on the grid endpoints", spec.name())));
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r3 = RegimeSpec { regime: Regime::R3 { c: 1.0 }, k: 2, d: 2 };
        let s = regime_sequence(&r3, &[1000.0]).unwrap();
        assert!((s[0].1 - (1.0f64 / 1000.0).sqrt()).abs() < 1e-15);

        let r1 = RegimeSpec { regime: Regime::R1 { delta: 0.4 }, k: 3, d: 1 };
        let s = regime_sequence(&r1, &[1e2, 1e3, 1e4]).unwrap();
        assert!((s[2].1 / 10f64.powf(-5.6) - 1.0).abs() < 1e-12);
        assert!(s[2].0 * s[2].1 < s[0].0 * s[0].1);

        let r2 = RegimeSpec { regime: Regime::R2 { beta: 0.5 }, k: 2, d: 2 };
        let s = regime_sequence(&r2, &[100.0, 400.0]).unwrap();
        assert!((s[1].0 * s[1].1.powi(2) - 20.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_parameters() {
        let bad = RegimeSpec { regime: Regime::R1 { delta: 0.5 }, k: 3, d: 1 };
        assert!(regime_sequence(&bad, &[10.0, 100.0]).is_err());
        let r3 = RegimeSpec { regime: Regime::R3 { c: 1.0 }, k: 2, d: 1 };
        assert!(regime_sequence(&r3, &[]).is_err());
        assert!(regime_sequence(&r3, &[10.0, 5.0]).is_err());
    }
}

//! Closed-form rate diagnostics for rescaled chaos expansions.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kernel_algebra::b3::quadruples;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaTerm {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub l: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaReport {
    /// `alpha^d / sigma^4 * max over quadruples of (gamma_i gamma_j)^2 m^(q_i + q_j - r + l)`;
    /// 0 when the quadruple set is empty.
    pub omega: f64,
    /// `alpha^d / sigma^4 * max_i gamma_i^4 m^(q_i)`.
    pub omega_prime: f64,
    pub terms: Vec<OmegaTerm>,
}

pub fn omega_diagnostics(gammas: &[f64], orders: &[usize], m: f64, alpha: f64, d: usize, sigma: f64) -> Result<OmegaReport> {
    if gammas.is_empty() || gammas.len() != orders.len() {
        return Err(invalid("gammas", "one positive gamma per order is required"));
    }
    if orders[0] == 0 || orders.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("orders", "must be positive and strictly increasing"));
    }
    for (name, v) in [("m", m), ("alpha", alpha), ("sigma", sigma)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid("omega", format!("{name} must be positive, got {v}")));
        }
    }
    if gammas.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(invalid("gammas", "must be positive"));
    }
    let pre = alpha.powi(d as i32) / sigma.powi(4);
    let terms: Vec<OmegaTerm> = quadruples(orders)
        .into_iter()
        .map(|(i, j, r, l)| {
            let e = (orders[i] + orders[j] + l) as i32 - r as i32;
            OmegaTerm { i, j, r, l, value: pre * (gammas[i] * gammas[j]).powi(2) * m.powi(e) }
        })
        .collect();
    let omega = terms.iter().map(|t| t.value).fold(0.0, f64::max);
    let omega_prime = gammas.iter().zip(orders).map(|(g, &q)| pre * g.powi(4) * m.powi(q as i32)).fold(0.0, f64::max);
    Ok(OmegaReport { omega, omega_prime, terms })
}

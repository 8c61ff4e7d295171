//! The contraction bound B3 over a finite chaos expansion.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{Control, Integrator};
use crate::kernel_algebra::kernel::RandomizedKernel;
use crate::kernel_algebra::norms::{contraction_norm_sq, lp_norm_pow};

/// `(i, j, r, l)` with `1 <= l <= r <= q_i <= q_j`, `l != q_j`, over index
/// pairs `i <= j` (orders strictly increasing, so `q_i <= q_j` iff `i <= j`).
/// Indices are 0-based positions in `orders`.
pub fn quadruples(orders: &[usize]) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for i in 0..orders.len() {
        for j in i..orders.len() {
            let (qi, qj) = (orders[i], orders[j]);
            for r in 1..=qi {
                for l in 1..=r {
                    if l != qj {
                        out.push((i, j, r, l));
                    }
                }
            }
        }
    }
    out
}

/// One audited contraction norm `||f_i *_r^l f_j||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrupleRecord {
    pub i: usize,
    pub j: usize,
    pub r: usize,
    pub l: usize,
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct B3Report {
    pub value: MCEstimate,
    pub sigma: f64,
    pub quadruples: Vec<QuadrupleRecord>,
    /// `||f_i||_{L^4}^2` per term.
    pub l4: Vec<MCEstimate>,
}

fn check_orders(orders: &[usize]) -> Result<()> {
    if orders.is_empty() {
        return Err(invalid("kernels", "empty kernel list"));
    }
    if orders.windows(2).any(|w| w[0] >= w[1]) || orders[0] == 0 {
        return Err(invalid("kernels", "orders must be positive and strictly increasing"));
    }
    Ok(())
}

/// Per-term pieces of the bound before the `1/sigma` factor; reusable
/// across sigmas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct B3Parts {
    pub quadruples: Vec<QuadrupleRecord>,
    pub l4: Vec<MCEstimate>,
}

impl B3Parts {
    pub fn compute(terms: &[Arc<dyn RandomizedKernel>], control: &Control, integrator: Integrator) -> Result<Self> {
        let orders: Vec<usize> = terms.iter().map(|t| t.order()).collect();
        check_orders(&orders)?;
        let mut quads = Vec::new();
        for (n, &(i, j, r, l)) in quadruples(&orders).iter().enumerate() {
            let sq = contraction_norm_sq(terms[i].clone(), terms[j].clone(), r, l, control, integrator.child(n as u64))?;
            let e = sq.sqrt();
            quads.push(QuadrupleRecord { i, j, r, l, value: e.value, std_error: e.std_error, n_samples: e.n_samples });
        }
        let l4 = terms
            .iter()
            .enumerate()
            .map(|(i, t)| Ok(lp_norm_pow(t.as_ref(), 4, control, integrator.child(1 << 20 | i as u64))?.sqrt()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { quadruples: quads, l4 })
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<B3Report> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(invalid("sigma", format!("must be positive, got {sigma}")));
        }
        let q = MCEstimate::max_of(self.quadruples.iter().map(|r| MCEstimate {
            value: r.value,
            std_error: r.std_error,
            n_samples: r.n_samples,
        }))
        .unwrap_or(MCEstimate::ZERO);
        let l = MCEstimate::max_of(self.l4.iter().copied()).unwrap_or(MCEstimate::ZERO);
        let sum = q.add(l);
        let value = MCEstimate { value: sum.value / sigma, std_error: sum.std_error / sigma, n_samples: sum.n_samples };
        Ok(B3Report { value, sigma, quadruples: self.quadruples.clone(), l4: self.l4.clone() })
    }
}

/// `(1/sigma) [max ||f_i *_r^l f_j|| + max ||f_i||_{L^4}^2]`.
pub fn b3_bound(terms: &[Arc<dyn RandomizedKernel>], sigma: f64, control: &Control, integrator: Integrator) -> Result<B3Report> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    B3Parts::compute(terms, control, integrator)?.with_sigma(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_algebra::kernel::catalog;
    use crate::point_process::{MarkDistribution, Window};

    #[test]
    fn quadruple_sets() {
        assert!(quadruples(&[1]).is_empty());
        assert_eq!(quadruples(&[2]), vec![(0, 0, 1, 1), (0, 0, 2, 1)]);
        let q = quadruples(&[1, 2]);
        assert_eq!(q, vec![(0, 1, 1, 1), (1, 1, 1, 1), (1, 1, 2, 1)]);
    }

    #[test]
    fn order_one_constant() {
        // ||c||_{L^4}^2 = c^2 V^{1/2}
        let c = Control::on_window(Window::cube(1, 2.0).unwrap(), 1.0, MarkDistribution::None).unwrap();
        let t: Arc<dyn RandomizedKernel> = Arc::new(catalog::constant(1, 3.0));
        let r = b3_bound(&[t], 1.0, &c, Integrator::mc(1000, 1)).unwrap();
        assert!(r.quadruples.is_empty());
        assert!((r.value.value - 9.0 * 2.0).abs() < 1e-9);
    }

    #[test]
    fn homogeneous_in_sigma() {
        let c = Control::lebesgue(Window::cube(1, 1.0).unwrap());
        let t: Vec<Arc<dyn RandomizedKernel>> = vec![Arc::new(catalog::constant(1, 0.5)), Arc::new(catalog::pair_indicator(0.3))];
        let parts = B3Parts::compute(&t, &c, Integrator::mc(4000, 5)).unwrap();
        let a = parts.with_sigma(1.5).unwrap().value.value;
        for k in [2.0, 4.0] {
            let b = parts.with_sigma(1.5 * k).unwrap().value.value;
            assert_eq!(a / k, b);
        }
        assert!(b3_bound(&t, 0.0, &c, Integrator::mc(10, 0)).is_err());
        assert!(b3_bound(&[], 1.0, &c, Integrator::mc(10, 0)).is_err());
    }
}

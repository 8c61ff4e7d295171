//! Norms of rescaled kernels `f(x) = gamma h(alpha x)` against the
//! corresponding norms of `h` on the dilated window.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::kernel_algebra::contraction::check_indices;
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{Control, Integrator};
use crate::kernel_algebra::kernel::{Kernel, RandomizedKernel};
use crate::kernel_algebra::norms::{contraction_norm_sq, lp_norm_pow};
use crate::point_process::{MarkDistribution, Window};

/// Parameters shared by both identities.
#[derive(Debug, Clone, PartialEq)]
pub struct Rescaling {
    pub gamma: f64,
    pub gamma_prime: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub window: Window,
    pub marks: MarkDistribution,
}

impl Rescaling {
    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid("lambda", format!("must be positive, got {}", self.lambda)));
        }
        if !(self.gamma.is_finite() && self.gamma_prime.is_finite()) {
            return Err(invalid("gamma", "must be finite"));
        }
        Ok(())
    }

    /// `mu_lambda` on the base window.
    pub fn scaled_control(&self) -> Result<Control> {
        Control::on_window(self.window.clone(), self.lambda, self.marks.clone())
    }

    /// `mu` on the window dilated by `alpha`.
    pub fn dilated_control(&self) -> Result<Control> {
        Control::on_window(self.window.dilated(self.alpha)?, 1.0, self.marks.clone())
    }

    fn factor(&self) -> f64 {
        self.lambda * self.alpha.powi(-(self.window.dim() as i32))
    }
}

/// `(lhs, rhs)` with `lhs = ||f *_r^l f'||^2` under `mu_lambda` and
/// `rhs = gamma^2 gamma'^2 (lambda alpha^-d)^(m + 2l) ||h *_r^l h'||^2` on the
/// dilated window, `m = q + k - r - l`. The two sides use independent streams.
pub fn verify_rescaling(
    h: &Kernel,
    h2: &Kernel,
    r: usize,
    l: usize,
    s: &Rescaling,
    integrator: Integrator,
) -> Result<(MCEstimate, MCEstimate)> {
    s.validate()?;
    let (k, q) = (h.order(), h2.order());
    check_indices(k, q, r, l)?;
    if !(1 <= l && q <= k) {
        return Err(invalid("r", format!("need 1 <= l <= r <= q <= k, got k={k} q={q} r={r} l={l}")));
    }
    let f: Arc<dyn RandomizedKernel> = Arc::new(h.rescaled(s.gamma, s.alpha));
    let f2: Arc<dyn RandomizedKernel> = Arc::new(h2.rescaled(s.gamma_prime, s.alpha));
    let lhs = contraction_norm_sq(f, f2, r, l, &s.scaled_control()?, integrator.child(0))?;
    let base = contraction_norm_sq(Arc::new(h.clone()), Arc::new(h2.clone()), r, l, &s.dilated_control()?, integrator.child(1))?;
    let m = (q + k - r - l) as i32;
    let c = (s.gamma * s.gamma_prime).powi(2) * s.factor().powi(m + 2 * l as i32);
    Ok((lhs, base.scale(c)))
}

/// `(||f||_p^p under mu_lambda, gamma^p (lambda alpha^-d)^k ||h||_p^p on the dilated window)`.
pub fn verify_rescaling_lp(h: &Kernel, p: usize, s: &Rescaling, integrator: Integrator) -> Result<(MCEstimate, MCEstimate)> {
    s.validate()?;
    let k = h.order() as i32;
    let f = h.rescaled(s.gamma, s.alpha);
    let lhs = lp_norm_pow(&f, p, &s.scaled_control()?, integrator.child(0))?;
    let base = lp_norm_pow(h, p, &s.dilated_control()?, integrator.child(1))?;
    Ok((lhs, base.scale(s.gamma.abs().powi(p as i32) * s.factor().powi(k))))
}

//! Numerical checks of the window bounds for stationary kernels.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kernel_algebra::a_functional::{a_kappa_p, a_prime_p, hbar_norm_pow, stationary_projection};
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{Control, Integrator};
use crate::kernel_algebra::kappa::KappaDensity;
use crate::kernel_algebra::kernel::Kernel;
use crate::kernel_algebra::norms::{contraction_norm_sq, lp_norm_pow};
use crate::point_process::{MarkDistribution, Window};

/// Tolerance, in standard errors, used by every `holds` flag below.
pub const CHECK_SIGMAS: f64 = 4.0;

/// Product of powers of independent positive estimates, `prod e_i^{a_i}`,
/// with a first-order standard error.
fn power_product(parts: &[(MCEstimate, f64)]) -> MCEstimate {
    let value: f64 = parts.iter().map(|(e, a)| e.value.powf(*a)).product();
    let rel = parts.iter().map(|(e, a)| if e.value > 0.0 { a * e.std_error / e.value } else { 0.0 }).map(|x| x * x).sum::<f64>().sqrt();
    MCEstimate { value, std_error: value.abs() * rel, n_samples: parts.iter().map(|(e, _)| e.n_samples).sum() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowBoundCheck {
    pub r: usize,
    pub l: usize,
    /// `||h *_r^l g||^2` under unit intensity on the window.
    pub lhs: MCEstimate,
    /// `l(X) sqrt(A4(hbar) A4(gbar))` if `r > l`,
    /// `l(X) sqrt(A2(hbar) A4(hbar) A2(gbar) A4(gbar))` if `r = l`.
    pub bound: MCEstimate,
    pub holds: bool,
}

/// Contraction norm on a window against the A-functional bound, for
/// non-negative stationary `h` (order k) and `g` (order q <= k) with
/// `1 <= l <= r <= q`, `l <= k - 1`.
pub fn contraction_window_bound(
    h: &Kernel,
    g: &Kernel,
    r: usize,
    l: usize,
    window: &Window,
    marks: &MarkDistribution,
    kappa: &KappaDensity,
    integrator: Integrator,
) -> Result<WindowBoundCheck> {
    let (k, q) = (h.order(), g.order());
    if !(1 <= l && l <= r && r <= q && q <= k && l < k) {
        return Err(invalid("r", format!("need 1 <= l <= r <= q <= k and l <= k - 1, got k={k} q={q} r={r} l={l}")));
    }
    if !(h.stationary && g.stationary) {
        return Err(invalid("kernel", "both kernels must be stationary"));
    }
    let control = Control::on_window(window.clone(), 1.0, marks.clone())?;
    let lhs = contraction_norm_sq(Arc::new(h.clone()), Arc::new(g.clone()), r, l, &control, integrator.child(0))?;
    let a = |f: &Kernel, p: usize, tag: u64| a_kappa_p(f, kappa, p, marks, integrator.child(tag));
    let parts = if r > l {
        vec![(a(h, 4, 1)?, 0.5), (a(g, 4, 2)?, 0.5)]
    } else {
        vec![(a(h, 2, 3)?, 0.5), (a(h, 4, 1)?, 0.5), (a(g, 2, 4)?, 0.5), (a(g, 4, 2)?, 0.5)]
    };
    let bound = power_product(&parts).scale(window.volume());
    let holds = lhs.value <= bound.value + CHECK_SIGMAS * (lhs.std_error + bound.std_error);
    Ok(WindowBoundCheck { r, l, lhs, bound, holds })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionBoundCheck {
    pub level: usize,
    pub p: usize,
    /// `A_p(hbar_j)`.
    pub projection: MCEstimate,
    /// `A'_p(hbar)`.
    pub dominating: MCEstimate,
    pub holds: bool,
}

/// `A_p(hbar_j)` against `A'_p(hbar)` for every level `j`. With `weighted`
/// the projections carry their `C(k, j)` prefactor.
pub fn projection_bound(
    h: &Kernel,
    p: usize,
    kappa: &KappaDensity,
    marks: &MarkDistribution,
    integrator: Integrator,
    weighted: bool,
) -> Result<Vec<ProjectionBoundCheck>> {
    if !h.stationary {
        return Err(invalid("kernel", "must be stationary"));
    }
    let dominating = a_prime_p(h, kappa, p, marks, integrator.child(0))?;
    (1..=h.order())
        .map(|j| {
            let f = stationary_projection(h, j, kappa, marks, integrator.child(100 + j as u64), weighted)?;
            let projection = a_kappa_p(&f, kappa, p, marks, integrator.child(j as u64))?;
            let holds = projection.value <= dominating.value + CHECK_SIGMAS * (projection.std_error + dominating.std_error);
            Ok(ProjectionBoundCheck { level: j, p, projection, dominating, holds })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthPoint {
    pub lambda: f64,
    /// `||h||_p^p` on the window dilated by lambda over `lambda^d l(X) ||hbar||_p^p`.
    pub ratio: MCEstimate,
}

/// Ratio of the `L^p` norm on a growing window to its stationary
/// first-order approximation, along `lambdas`.
pub fn growth_ratio(
    h: &Kernel,
    p: usize,
    window: &Window,
    lambdas: &[f64],
    marks: &MarkDistribution,
    kappa: &KappaDensity,
    integrator: Integrator,
) -> Result<Vec<GrowthPoint>> {
    if !h.stationary {
        return Err(invalid("kernel", "must be stationary"));
    }
    let hbar = hbar_norm_pow(h, kappa, p, marks, integrator.child(0))?;
    if hbar.value <= 0.0 {
        return Err(invalid("kernel", "hbar has zero norm"));
    }
    lambdas
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let grown = window.dilated(lambda)?;
            let control = Control::on_window(grown.clone(), 1.0, marks.clone())?;
            let num = lp_norm_pow(h, p, &control, integrator.child(1 + i as u64))?;
            let ratio = power_product(&[(num, 1.0), (hbar, -1.0)]).scale(1.0 / grown.volume());
            Ok(GrowthPoint { lambda, ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_algebra::kernel::catalog;

    #[test]
    fn growth_ratio_for_unit_indicator() {
        // on [-L/2, L/2] the ratio is (2L - 1) / (2L)
        let h = catalog::pair_indicator(1.0);
        let w = Window::unit_volume(1).unwrap();
        let pts = growth_ratio(&h, 2, &w, &[4.0, 8.0, 16.0], &MarkDistribution::None, &KappaDensity::cauchy(), Integrator::mc(200_000, 2))
            .unwrap();
        for g in pts {
            let want = 1.0 - 1.0 / (2.0 * g.lambda);
            assert!(g.ratio.within(want, 4.0), "{} vs {want}", g.ratio);
        }
    }

    #[test]
    fn window_bound_on_indicators() {
        let h = catalog::clique_indicator(3, 0.5);
        let g = catalog::pair_indicator(0.5);
        let w = Window::cube(1, 2.0).unwrap();
        for (r, l) in [(1, 1), (2, 1), (2, 2)] {
            let c = contraction_window_bound(&h, &g, r, l, &w, &MarkDistribution::None, &KappaDensity::cauchy(), Integrator::mc(40_000, 3))
                .unwrap();
            assert!(c.holds, "r={r} l={l}: {} > {}", c.lhs, c.bound);
        }
    }

    #[test]
    fn unweighted_projections_are_dominated() {
        let h = catalog::pair_indicator(1.0);
        for p in [2, 4] {
            let checks =
                projection_bound(&h, p, &KappaDensity::cauchy(), &MarkDistribution::None, Integrator::mc(100_000, 5), false).unwrap();
            assert!(checks.iter().all(|c| c.holds), "{checks:?}");
        }
    }

    #[test]
    fn weighted_first_projection_exceeds_bound() {
        // hbar_1 = C(2,1) * 2 = 4, A_2 = 16 > 8 pi / 3
        let h = catalog::pair_indicator(1.0);
        let checks = projection_bound(&h, 2, &KappaDensity::cauchy(), &MarkDistribution::None, Integrator::mc(100_000, 5), true).unwrap();
        assert!(checks[0].projection.within(16.0, 4.0), "{:?}", checks[0]);
        assert!(!checks[0].holds);
    }
}

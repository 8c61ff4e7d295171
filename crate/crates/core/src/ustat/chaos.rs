use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::{factorial, integral, norm_sq, ChaosKernel, Control, Integrator, Kernel, MCEstimate};

/// Largest order for which the full variance sum is computed.
pub const MAX_VARIANCE_ORDER: usize = 6;

/// `f_i = C(k, i) int h(x_i, .) dmu^{k-i}`; level `k` is `h` itself.
pub fn project_kernel(h: &Kernel, level: usize, control: &Control, integrator: Integrator) -> Result<ChaosKernel> {
    ChaosKernel::new(h.clone(), level, control.clone(), integrator)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTerm {
    pub i: usize,
    /// `||f_i||^2` under `mu^i`.
    pub norm_sq: MCEstimate,
    /// `i!`
    pub factorial_weight: f64,
}

impl LevelTerm {
    /// `i! ||f_i||^2`, the variance contributed by level `i`.
    pub fn variance(&self) -> MCEstimate {
        self.norm_sq.scale(self.factorial_weight)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChaosDecomposition {
    pub order: usize,
    /// `E F = int h dmu^k`.
    pub mean: MCEstimate,
    pub levels: Vec<LevelTerm>,
    pub variance: MCEstimate,
}

/// Mean and variance of the U-statistic with kernel `h` under a Poisson
/// process with control `control`, by orthogonality of the chaos levels.
pub fn chaos_moments(h: &Kernel, control: &Control, integrator: Integrator) -> Result<ChaosDecomposition> {
    let k = h.order();
    if k > MAX_VARIANCE_ORDER {
        return Err(Error::OrderTooLarge { order: k, max: MAX_VARIANCE_ORDER });
    }
    let mean = integral(h, control, integrator.child(0))?;
    let levels = (1..=k)
        .map(|i| {
            let f = project_kernel(h, i, control, integrator.child(100 + i as u64))?;
            let norm_sq = norm_sq(&f, control, integrator.child(i as u64))?;
            Ok(LevelTerm { i, norm_sq, factorial_weight: factorial(i) })
        })
        .collect::<Result<Vec<_>>>()?;
    let variance = levels.iter().fold(MCEstimate::ZERO, |acc, l| acc.add(l.variance()));
    Ok(ChaosDecomposition { order: k, mean, levels, variance })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    /// Smallest level whose squared norm is distinguishable from zero.
    pub rank: usize,
    pub tol: f64,
    pub levels: Vec<LevelTerm>,
}

/// Hoeffding rank `q_1`: the first level `i` with `||f_i||^2 > tol + 4 SE`.
/// `tol` defaults to `1e-6 * ||f_k||^2`.
pub fn detect_hoeffding_rank(h: &Kernel, control: &Control, integrator: Integrator, tol: Option<f64>) -> Result<RankReport> {
    let k = h.order();
    if k > MAX_VARIANCE_ORDER {
        return Err(Error::OrderTooLarge { order: k, max: MAX_VARIANCE_ORDER });
    }
    control.window()?;
    let mut levels = Vec::with_capacity(k);
    for i in 1..=k {
        let f = project_kernel(h, i, control, integrator.child(100 + i as u64))?;
        levels.push(LevelTerm { i, norm_sq: norm_sq(&f, control, integrator.child(i as u64))?, factorial_weight: factorial(i) });
    }
    let tol = match tol {
        Some(t) if t.is_finite() && t >= 0.0 => t,
        Some(t) => return Err(invalid("tol", format!("must be non-negative, got {t}"))),
        None => 1e-6 * levels[k - 1].norm_sq.value.abs(),
    };
    match levels.iter().find(|l| l.norm_sq.value > tol + 4.0 * l.norm_sq.std_error) {
        Some(l) => Ok(RankReport { rank: l.i, tol, levels }),
        None => Err(Error::DegenerateRank { order: k }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_algebra::catalog;
    use crate::point_process::{MarkDistribution, MarkedPoint, Window};

    fn sym() -> Control {
        Control::lebesgue(Window::cube(1, 1.0).unwrap())
    }

    #[test]
    fn constant_kernel_moments() {
        let c = Control::lebesgue(Window::unit_volume(1).unwrap());
        let d = chaos_moments(&catalog::constant(2, 1.0), &c, Integrator::mc(10_000, 1)).unwrap();
        assert!((d.mean.value - 1.0).abs() < 1e-12);
        assert!((d.variance.value - 6.0).abs() < 1e-12, "{}", d.variance);
        let z = chaos_moments(&catalog::constant(2, 0.0), &c, Integrator::mc(1000, 1)).unwrap();
        assert_eq!((z.mean.value, z.variance.value), (0.0, 0.0));
    }

    #[test]
    fn constant_projection_values() {
        let c = Control::on_window(Window::cube(1, 1.0).unwrap(), 3.0, MarkDistribution::None).unwrap();
        let f = project_kernel(&catalog::constant(3, 2.0), 1, &c, Integrator::mc(100, 2)).unwrap();
        // C(3,1) * 2 * 6^2
        assert!((f.eval(&[MarkedPoint::at(0.1)]).unwrap().value - 216.0).abs() < 1e-9);
    }

    #[test]
    fn sign_kernel_first_projection_vanishes() {
        let f = project_kernel(&catalog::sign(), 1, &sym(), Integrator::mc(40_000, 3)).unwrap();
        for x in [-0.9, -0.2, 0.01, 0.4, 0.95] {
            let e = f.eval(&[MarkedPoint::at(x)]).unwrap();
            assert!(e.value.abs() <= 4.0 * e.std_error, "x={x}: {e}");
        }
    }

    #[test]
    fn hoeffding_ranks() {
        let g = Integrator::mc(40_000, 4);
        assert_eq!(detect_hoeffding_rank(&catalog::sign(), &sym(), g, None).unwrap().rank, 2);
        assert_eq!(detect_hoeffding_rank(&catalog::constant(2, 1.0), &sym(), g, None).unwrap().rank, 1);
        assert_eq!(detect_hoeffding_rank(&catalog::product(), &sym(), g, None).unwrap().rank, 2);
        assert!(matches!(detect_hoeffding_rank(&catalog::constant(2, 0.0), &sym(), g, None), Err(Error::DegenerateRank { order: 2 })));
    }
}

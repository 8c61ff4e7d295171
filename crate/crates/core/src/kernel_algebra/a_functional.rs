//! kappa-weighted integrals of the factorization `hbar(t) = h(0, t)` of a
//! stationary kernel over `(R^d)^(k-1)` and the mark space.

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::chaos_kernel::{ChaosKernel, MAX_ARGS, UNSTABLE_RELATIVE_SE};
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{check_grid_dim, grid_sum, mc_mean, Control, Integrator};
use crate::kernel_algebra::kappa::KappaDensity;
use crate::kernel_algebra::kernel::{Kernel, RandomizedKernel};
use crate::point_process::{MarkDistribution, MarkedPoint};

/// `int kappa_{k-1}(t)^(-e) hbar(t)^p dt dnu(m)`, with `hbar(t) = h(0, t)`.
///
/// Monte Carlo samples `t ~ kappa^(k-1)` and weights by `kappa^-(1+e)`;
/// the grid backend integrates over `[-R, R]^{d(k-1)}` with `R` the
/// interaction radius of `h`.
pub fn kappa_integral(
    h: &dyn RandomizedKernel,
    kappa: &KappaDensity,
    p: usize,
    exponent: f64,
    marks: &MarkDistribution,
    integrator: Integrator,
) -> Result<MCEstimate> {
    if p == 0 {
        return Err(invalid("p", "must be positive"));
    }
    let k = h.order();
    if k > MAX_ARGS {
        return Err(invalid("order", format!("at most {MAX_ARGS} arguments")));
    }
    let d = kappa.dim();
    let exact = h.is_exact();
    let power = |v: f64| if exact { v.abs().powi(p as i32) } else { v.powi(p as i32) };
    match integrator {
        Integrator::MonteCarlo { budget, key } => Ok(mc_mean(budget, key, |rng| {
            let mut args = [MarkedPoint::default(); MAX_ARGS];
            args[0].mark = marks.sample(rng);
            let mut w = 1.0;
            for slot in args.iter_mut().take(k).skip(1) {
                let t = kappa.sample(rng);
                w *= kappa.density(&t[..d]).powf(-(1.0 + exponent));
                *slot = MarkedPoint { coords: t, mark: marks.sample(rng) };
            }
            let a = &args[..k];
            if exact {
                return w * power(h.draw(a, rng));
            }
            let mut prod = w;
            for _ in 0..p {
                prod *= h.draw(a, rng);
                if prod == 0.0 {
                    break;
                }
            }
            prod
        })),
        Integrator::Grid(g) => {
            check_grid_dim(d, k - 1)?;
            let control = Control::full_space(d, 1.0, marks.clone())?;
            let origin = MarkedPoint::default();
            let radius = h.interaction_radius();
            let free = if k > 1 { control.grid_nodes(Some(&origin), radius, &g)? } else { vec![] };
            let mark_nodes = marks.nodes(&g.rule.unit_nodes(g.nodes));
            let err = std::sync::Mutex::new(None);
            let mut total = 0.0;
            for (m0, w0) in &mark_nodes {
                let s = grid_sum(&free, k - 1, |z| {
                    let mut args = [MarkedPoint::default(); MAX_ARGS];
                    args[0].mark = *m0;
                    args[1..k].copy_from_slice(z);
                    let wk: f64 = z.iter().map(|x| kappa.density(&x.coords[..d]).powf(-exponent)).product();
                    match h.quadrature(&args[..k], &g) {
                        Ok(v) => wk * power(v),
                        Err(e) => {
                            *err.lock().unwrap() = Some(e);
                            0.0
                        }
                    }
                });
                total += w0 * s;
            }
            if let Some(e) = err.into_inner().unwrap() {
                return Err(e);
            }
            Ok(MCEstimate::exact(total))
        }
    }
}

fn checked(e: MCEstimate) -> Result<MCEstimate> {
    if e.std_error > UNSTABLE_RELATIVE_SE * e.value.abs() {
        return Err(Error::UnstableEstimate { estimate: e });
    }
    Ok(e)
}

/// `A_p(hbar) = int kappa_{k-1}^-1 hbar^p`.
pub fn a_kappa_p(
    h: &dyn RandomizedKernel,
    kappa: &KappaDensity,
    p: usize,
    marks: &MarkDistribution,
    integrator: Integrator,
) -> Result<MCEstimate> {
    checked(kappa_integral(h, kappa, p, 1.0, marks, integrator)?)
}

/// `A'_p(hbar) = int kappa_{k-1}^(1-p) hbar^p`.
pub fn a_prime_p(
    h: &dyn RandomizedKernel,
    kappa: &KappaDensity,
    p: usize,
    marks: &MarkDistribution,
    integrator: Integrator,
) -> Result<MCEstimate> {
    checked(kappa_integral(h, kappa, p, p as f64 - 1.0, marks, integrator)?)
}

/// `||hbar||_p^p` over `(R^d)^(k-1)` and the marks.
pub fn hbar_norm_pow(
    h: &dyn RandomizedKernel,
    kappa: &KappaDensity,
    p: usize,
    marks: &MarkDistribution,
    integrator: Integrator,
) -> Result<MCEstimate> {
    checked(kappa_integral(h, kappa, p, 0.0, marks, integrator)?)
}

/// Level-`j` projection of a stationary kernel over `R^d` with unit
/// intensity, so that its factorization is `hbar_j`. With `weighted` the
/// `C(k, j)` prefactor is kept; without it the projection is the bare
/// integral.
pub fn stationary_projection(
    h: &Kernel,
    level: usize,
    kappa: &KappaDensity,
    marks: &MarkDistribution,
    integrator: Integrator,
    weighted: bool,
) -> Result<ChaosKernel> {
    let mut control = Control::full_space(kappa.dim(), 1.0, marks.clone())?;
    if h.interaction_radius.is_none() {
        control = control.with_proposal(kappa.clone())?;
    }
    let f = ChaosKernel::new(h.clone(), level, control, integrator)?;
    Ok(if weighted { f } else { f.with_weight(1.0) })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::kernel_algebra::integrate::GridSpec;
    use crate::kernel_algebra::kernel::catalog;

    #[test]
    fn cauchy_oracles_by_quadrature() {
        let h = catalog::pair_indicator(1.0);
        let kappa = KappaDensity::cauchy();
        let g = Integrator::Grid(GridSpec::gauss(16));
        let a2 = a_kappa_p(&h, &kappa, 2, &MarkDistribution::None, g).unwrap();
        assert!((a2.value - 8.0 * PI / 3.0).abs() < 1e-6 * a2.value, "{a2}");
        let a4 = a_prime_p(&h, &kappa, 4, &MarkDistribution::None, g).unwrap();
        let want = PI.powi(3) * 192.0 / 35.0;
        assert!((a4.value - want).abs() < 1e-6 * want, "{a4}");
    }

    #[test]
    fn cauchy_oracle_by_mc() {
        let h = catalog::pair_indicator(1.0);
        let kappa = KappaDensity::cauchy();
        let e = a_kappa_p(&h, &kappa, 2, &MarkDistribution::None, Integrator::mc(200_000, 1)).unwrap();
        assert!(e.within(8.0 * PI / 3.0, 4.0), "{e}");
        let e2 = a_prime_p(&h, &kappa, 2, &MarkDistribution::None, Integrator::mc(200_000, 1)).unwrap();
        assert_eq!(e, e2);
    }

    #[test]
    fn zero_kernel() {
        let h = catalog::constant(2, 0.0);
        let e = a_kappa_p(&h, &KappaDensity::cauchy(), 4, &MarkDistribution::None, Integrator::mc(1000, 1)).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn heavy_integrand_is_flagged() {
        // a handful of hits far in the Cauchy tail, each with weight kappa^-2
        let h = Kernel::new(2, "far", |a| f64::from(a[0].dist(&a[1]) > 1200.0)).stationary();
        let r = a_kappa_p(&h, &KappaDensity::cauchy(), 2, &MarkDistribution::None, Integrator::mc(2000, 4));
        assert!(matches!(r, Err(Error::UnstableEstimate { .. })), "{r:?}");
    }
}

//! Integrals of products of independent kernel draws over a window.

use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::kernel_algebra::chaos_kernel::MAX_ARGS;
use crate::kernel_algebra::contraction::Contraction;
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{check_grid_dim, grid_sum, mc_mean, Control, Integrator};
use crate::kernel_algebra::kernel::RandomizedKernel;
use crate::point_process::MarkedPoint;

/// `int f_1 ... f_p dmu^k` where the `f_j` are independent draws of `f`.
///
/// This is `int f^p` for every `f`, and `int |f|^p` whenever `p` is even,
/// `f >= 0`, or `f` is exact (then `|f|` is taken pointwise).
pub fn power_integral(f: &dyn RandomizedKernel, p: usize, control: &Control, integrator: Integrator) -> Result<MCEstimate> {
    if p == 0 {
        return Err(invalid("p", "must be positive"));
    }
    let k = f.order();
    if k > MAX_ARGS {
        return Err(invalid("order", format!("at most {MAX_ARGS} arguments")));
    }
    let mass = control.mass()?;
    let radius = f.interaction_radius();
    let exact = f.is_exact();
    let window = control.window()?;
    match integrator {
        Integrator::MonteCarlo { budget, key } => Ok(mc_mean(budget, key, |rng| {
            let mut args = [MarkedPoint::default(); MAX_ARGS];
            let first = MarkedPoint { coords: window.sample_uniform(rng), mark: control.marks.sample(rng) };
            args[0] = first;
            let mut w = mass;
            for slot in args.iter_mut().take(k).skip(1) {
                let (z, wz) = control.draw_free(Some(&first), radius, rng);
                if wz == 0.0 {
                    return 0.0;
                }
                *slot = z;
                w *= wz;
            }
            let a = &args[..k];
            if exact {
                let v = f.draw(a, rng);
                w * v.abs().powi(p as i32)
            } else {
                let mut prod = w;
                for _ in 0..p {
                    prod *= f.draw(a, rng);
                    if prod == 0.0 {
                        break;
                    }
                }
                prod
            }
        })),
        Integrator::Grid(g) => {
            check_grid_dim(control.dim(), k)?;
            let nodes = control.grid_nodes(None, None, &g)?;
            let err = std::sync::Mutex::new(None);
            let s = grid_sum(&nodes, k, |a| match f.quadrature(a, &g) {
                Ok(v) if exact => v.abs().powi(p as i32),
                Ok(v) => v.powi(p as i32),
                Err(e) => {
                    *err.lock().unwrap() = Some(e);
                    0.0
                }
            });
            if let Some(e) = err.into_inner().unwrap() {
                return Err(e);
            }
            Ok(MCEstimate::exact(s))
        }
    }
}

/// `int f dmu^k`.
pub fn integral(f: &dyn RandomizedKernel, control: &Control, integrator: Integrator) -> Result<MCEstimate> {
    power_integral(f, 1, control, integrator)
}

/// `||f||_p^p`.
pub fn lp_norm_pow(f: &dyn RandomizedKernel, p: usize, control: &Control, integrator: Integrator) -> Result<MCEstimate> {
    power_integral(f, p, control, integrator)
}

/// `||f||_2^2`.
pub fn norm_sq(f: &dyn RandomizedKernel, control: &Control, integrator: Integrator) -> Result<MCEstimate> {
    power_integral(f, 2, control, integrator)
}

/// `||h *_r^l g||^2`, estimated as one flat integral over
/// `p + q - r + l` variables (two independent inner draws per sample).
pub fn contraction_norm_sq(
    h: Arc<dyn RandomizedKernel>,
    g: Arc<dyn RandomizedKernel>,
    r: usize,
    l: usize,
    control: &Control,
    integrator: Integrator,
) -> Result<MCEstimate> {
    let c = Contraction::new(h, g, r, l, control.clone(), integrator.child(0x5eed))?;
    if c.order() == 0 {
        // full contraction: a number, squared
        let e = match integrator {
            Integrator::MonteCarlo { budget, key } => mc_mean(budget, key, |rng| {
                let a = c.draw(&[], rng);
                a * c.draw(&[], rng)
            }),
            Integrator::Grid(gs) => MCEstimate::exact(c.quadrature(&[], &gs)?.powi(2)),
        };
        return Ok(e);
    }
    norm_sq(&c, control, integrator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_algebra::integrate::GridSpec;
    use crate::kernel_algebra::kernel::catalog;
    use crate::point_process::{MarkDistribution, Window};

    fn unit() -> Control {
        Control::on_window(Window::cube(1, 0.5).unwrap(), 1.0, MarkDistribution::None).unwrap()
    }

    #[test]
    fn pair_indicator_norm() {
        // int int 1{|x-y|<=t} over [0,1]^2 = 2t - t^2
        let t = 0.25;
        let h = catalog::pair_indicator(t);
        let e = norm_sq(&h, &unit(), Integrator::mc(200_000, 4)).unwrap();
        assert!(e.within(2.0 * t - t * t, 4.0), "{e}");
        let g = norm_sq(&h, &unit(), Integrator::Grid(GridSpec::midpoint(400))).unwrap();
        assert!((g.value - (2.0 * t - t * t)).abs() < 5e-3, "{g}");
    }

    #[test]
    fn constant_contractions() {
        // h = g = 1 of order 2 on a window of mass V: (h *_r^l g) = V^l, order 4 - r - l
        let v: f64 = 2.0;
        let c = Control::on_window(Window::cube(1, 1.0).unwrap(), 1.0, MarkDistribution::None).unwrap();
        let h: Arc<dyn RandomizedKernel> = Arc::new(catalog::constant(2, 1.0));
        for (r, l) in [(1, 0), (1, 1), (2, 1), (2, 2)] {
            let want = v.powi(2 * l as i32) * v.powi(4 - r as i32 - l as i32);
            let e = contraction_norm_sq(h.clone(), h.clone(), r, l, &c, Integrator::mc(20_000, 9)).unwrap();
            assert!((e.value - want).abs() < 1e-9 * want, "r={r} l={l}: {e} vs {want}");
        }
    }

    #[test]
    fn full_space_norm_is_infinite() {
        let c = Control::full_space(1, 1.0, MarkDistribution::None).unwrap();
        assert!(norm_sq(&catalog::pair_indicator(1.0), &c, Integrator::mc(10, 0)).is_err());
    }
}

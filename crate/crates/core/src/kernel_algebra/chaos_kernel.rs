use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{check_grid_dim, grid_sum, mc_mean, Control, GridSpec, Integrator};
use crate::kernel_algebra::kernel::{Kernel, RandomizedKernel};
use crate::point_process::MarkedPoint;
use crate::rng::StreamRng;

pub(crate) const MAX_ARGS: usize = 16;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Level-`i` projection `f_i(x_i) = C(k, i) int h(x_i, z_{k-i}) dmu^{k-i}`.
#[derive(Clone)]
pub struct ChaosKernel {
    base: Kernel,
    level: usize,
    control: Control,
    integrator: Integrator,
    weight: f64,
}

impl std::fmt::Debug for ChaosKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChaosKernel").field("base", &self.base).field("level", &self.level).field("weight", &self.weight).finish()
    }
}

/// Relative standard error above which `eval_checked` refuses an estimate.
pub const UNSTABLE_RELATIVE_SE: f64 = 0.5;

impl ChaosKernel {
    pub fn new(base: Kernel, level: usize, control: Control, integrator: Integrator) -> Result<Self> {
        let k = base.order();
        if level == 0 || level > k {
            return Err(invalid("level", format!("must lie in 1..={k}, got {level}")));
        }
        if level < k {
            control.check_inner(true, base.interaction_radius)?;
        }
        Ok(Self { weight: binomial(k, level), base, level, control, integrator })
    }

    /// Replaces the `C(k, i)` prefactor.
    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn base(&self) -> &Kernel {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn control(&self) -> &Control {
        &self.control
    }

    pub fn integrator(&self) -> &Integrator {
        &self.integrator
    }

    pub fn into_arc(self) -> Arc<dyn RandomizedKernel> {
        Arc::new(self)
    }

    /// Estimate of `f_i(args)`; exact for the top level and for grids.
    pub fn eval(&self, args: &[MarkedPoint]) -> Result<MCEstimate> {
        if args.len() != self.level {
            return Err(invalid("args", format!("expected {} points, got {}", self.level, args.len())));
        }
        if self.level == self.base.order() {
            return Ok(MCEstimate::exact(self.weight * self.base.eval(args)));
        }
        match self.integrator {
            Integrator::MonteCarlo { budget, key } => Ok(mc_mean(budget, key, |rng| self.draw(args, rng))),
            Integrator::Grid(g) => Ok(MCEstimate::exact(self.quadrature(args, &g)?)),
        }
    }

    /// As `eval`, but flags estimates whose relative standard error
    /// exceeds 50%.
    pub fn eval_checked(&self, args: &[MarkedPoint]) -> Result<MCEstimate> {
        let e = self.eval(args)?;
        if e.std_error > UNSTABLE_RELATIVE_SE * e.value.abs() {
            return Err(Error::UnstableEstimate { estimate: e });
        }
        Ok(e)
    }
}

impl RandomizedKernel for ChaosKernel {
    fn order(&self) -> usize {
        self.level
    }

    fn interaction_radius(&self) -> Option<f64> {
        self.base.interaction_radius
    }

    fn draw(&self, args: &[MarkedPoint], rng: &mut StreamRng) -> f64 {
        let k = self.base.order();
        let mut buf = [MarkedPoint::default(); MAX_ARGS];
        buf[..self.level].copy_from_slice(args);
        let mut w = self.weight;
        for slot in buf.iter_mut().take(k).skip(self.level) {
            let (z, wz) = self.control.draw_free(Some(&args[0]), self.base.interaction_radius, rng);
            if wz == 0.0 {
                return 0.0;
            }
            *slot = z;
            w *= wz;
        }
        w * self.base.eval(&buf[..k])
    }

    fn quadrature(&self, args: &[MarkedPoint], grid: &GridSpec) -> Result<f64> {
        let k = self.base.order();
        if self.level == k {
            return Ok(self.weight * self.base.eval(args));
        }
        check_grid_dim(self.control.dim(), k - self.level)?;
        let nodes = self.control.grid_nodes(Some(&args[0]), self.base.interaction_radius, grid)?;
        let s = grid_sum(&nodes, k - self.level, |z| {
            let mut buf = [MarkedPoint::default(); MAX_ARGS];
            buf[..self.level].copy_from_slice(args);
            buf[self.level..k].copy_from_slice(z);
            self.base.eval(&buf[..k])
        });
        Ok(self.weight * s)
    }

    fn is_exact(&self) -> bool {
        self.level == self.base.order()
    }
}

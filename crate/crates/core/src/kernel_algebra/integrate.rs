//! Control measures and the two integration backends.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::estimate::{MCEstimate, Moments};
use crate::kernel_algebra::kappa::KappaDensity;
use crate::kernel_algebra::quadrature::QuadratureRule;
use crate::point_process::{MarkDistribution, MarkedPoint, Window, MAX_DIM};
use crate::rng::{StreamKey, StreamRng};

/// Samples per independent stream; the reduction merges shards in index
/// order, so results do not depend on the rayon pool size.
pub const SHARD_SIZE: u64 = 16_384;

/// Largest `d * (number of gridded variables)` the tensor grid accepts.
pub const MAX_GRID_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    Window(Window),
    /// All of `R^d`. Only inner integrals anchored at a fixed argument are
    /// finite; they are sampled in the box of the kernel's interaction radius
    /// around the anchor, or from `proposal` when the kernel has no radius.
    FullSpace {
        dim: usize,
        proposal: Option<KappaDensity>,
    },
}

/// `mu = intensity * Lebesgue|_domain (x) marks`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Control {
    pub domain: Domain,
    pub intensity: f64,
    pub marks: MarkDistribution,
}

impl Control {
    pub fn new(domain: Domain, intensity: f64, marks: MarkDistribution) -> Result<Self> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return Err(invalid("intensity", format!("must be finite and positive, got {intensity}")));
        }
        marks.validate()?;
        if let Domain::FullSpace { dim, proposal } = &domain {
            if *dim == 0 || *dim > MAX_DIM {
                return Err(invalid("dim", format!("must lie in 1..={MAX_DIM}")));
            }
            if proposal.as_ref().is_some_and(|k| k.dim() != *dim) {
                return Err(invalid("proposal", "dimension differs from the domain"));
            }
        }
        Ok(Self { domain, intensity, marks })
    }

    pub fn on_window(window: Window, intensity: f64, marks: MarkDistribution) -> Result<Self> {
        Self::new(Domain::Window(window), intensity, marks)
    }

    /// Unmarked Lebesgue measure on `window`.
    pub fn lebesgue(window: Window) -> Self {
        Self::on_window(window, 1.0, MarkDistribution::None).expect("unit intensity")
    }

    pub fn full_space(dim: usize, intensity: f64, marks: MarkDistribution) -> Result<Self> {
        Self::new(Domain::FullSpace { dim, proposal: None }, intensity, marks)
    }

    pub fn with_proposal(mut self, kappa: KappaDensity) -> Result<Self> {
        match &mut self.domain {
            Domain::FullSpace { dim, proposal } if kappa.dim() == *dim => {
                *proposal = Some(kappa);
                Ok(self)
            }
            Domain::FullSpace { .. } => Err(invalid("proposal", "dimension differs from the domain")),
            Domain::Window(_) => Err(invalid("proposal", "only full-space controls take a proposal")),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.domain {
            Domain::Window(w) => w.dim(),
            Domain::FullSpace { dim, .. } => *dim,
        }
    }

    pub fn window(&self) -> Result<&Window> {
        match &self.domain {
            Domain::Window(w) => Ok(w),
            Domain::FullSpace { .. } => Err(Error::InfiniteMeasure("integral over all variables of a full-space control".into())),
        }
    }

    /// `mu(Z)`.
    pub fn mass(&self) -> Result<f64> {
        Ok(self.intensity * self.window()?.volume())
    }

    /// A draw from the normalized control `mu / mu(Z)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<MarkedPoint> {
        let w = self.window()?;
        let coords = w.sample_uniform(rng);
        Ok(MarkedPoint { coords, mark: self.marks.sample(rng) })
    }

    /// Whether inner integrals anchored at a point (with the given kernel
    /// radius) are finite for this control.
    pub fn check_inner(&self, anchored: bool, radius: Option<f64>) -> Result<()> {
        match &self.domain {
            Domain::Window(_) => Ok(()),
            Domain::FullSpace { proposal, .. } => {
                if !anchored {
                    return Err(Error::InfiniteMeasure("no fixed argument to anchor the integral".into()));
                }
                if radius.is_none() && proposal.is_none() {
                    return Err(Error::InfiniteMeasure("kernel has neither an interaction radius nor a proposal density".into()));
                }
                Ok(())
            }
        }
    }

    /// Box `[lo, hi]` (per axis) where an integrated variable can contribute.
    fn support_box(&self, anchor: Option<&MarkedPoint>, radius: Option<f64>) -> Option<([f64; MAX_DIM], [f64; MAX_DIM])> {
        let d = self.dim();
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        match (&self.domain, anchor, radius) {
            (Domain::Window(w), a, r) => {
                for i in 0..d {
                    let (mut l, mut h) = (-w.half_width()[i], w.half_width()[i]);
                    if let (Some(a), Some(r)) = (a, r) {
                        l = l.max(a.coords[i] - r);
                        h = h.min(a.coords[i] + r);
                    }
                    lo[i] = l;
                    hi[i] = h;
                }
            }
            (Domain::FullSpace { .. }, Some(a), Some(r)) => {
                for i in 0..d {
                    lo[i] = a.coords[i] - r;
                    hi[i] = a.coords[i] + r;
                }
            }
            _ => return None,
        }
        Some((lo, hi))
    }

    /// One weighted draw `(z, w)` with `E[w g(z)] = int g dmu` for every `g`
    /// vanishing outside the radius around `anchor`.
    pub fn draw_free<R: Rng + ?Sized>(&self, anchor: Option<&MarkedPoint>, radius: Option<f64>, rng: &mut R) -> (MarkedPoint, f64) {
        let d = self.dim();
        if let Some((lo, hi)) = self.support_box(anchor, radius) {
            let mut coords = [0.0; MAX_DIM];
            let mut vol = 1.0;
            for i in 0..d {
                let len = hi[i] - lo[i];
                if len <= 0.0 {
                    return (MarkedPoint { coords, mark: self.marks.sample(rng) }, 0.0);
                }
                vol *= len;
                coords[i] = lo[i] + len * rng.random::<f64>();
            }
            return (MarkedPoint { coords, mark: self.marks.sample(rng) }, self.intensity * vol);
        }
        let (Domain::FullSpace { proposal: Some(kappa), .. }, Some(a)) = (&self.domain, anchor) else {
            unreachable!("check_inner guards unanchored full-space draws");
        };
        let t = kappa.sample(rng);
        let mut p = a.translated(&t);
        p.mark = self.marks.sample(rng);
        (p, self.intensity / kappa.density(&t[..d]))
    }

    /// Tensor-grid nodes `(z, w)` for one integrated variable, weights
    /// including the intensity and the mark law.
    pub fn grid_nodes(&self, anchor: Option<&MarkedPoint>, radius: Option<f64>, grid: &GridSpec) -> Result<Vec<(MarkedPoint, f64)>> {
        let d = self.dim();
        let (lo, hi) = self
            .support_box(anchor, radius)
            .ok_or_else(|| Error::InfiniteMeasure("grid quadrature needs a window or an interaction radius".into()))?;
        let axes: Vec<Vec<(f64, f64)>> =
            (0..d).map(|i| if hi[i] > lo[i] { grid.rule.nodes_on(grid.nodes, lo[i], hi[i]) } else { vec![] }).collect();
        let marks = self.marks.nodes(&grid.rule.unit_nodes(grid.nodes));
        let mut out = Vec::new();
        let total: usize = axes.iter().map(Vec::len).product();
        for idx in 0..total {
            let mut rest = idx;
            let mut coords = [0.0; MAX_DIM];
            let mut w = self.intensity;
            for (i, ax) in axes.iter().enumerate() {
                let (x, wx) = ax[rest % ax.len()];
                rest /= ax.len();
                coords[i] = x;
                w *= wx;
            }
            for (m, wm) in &marks {
                out.push((MarkedPoint { coords, mark: *m }, w * wm));
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nodes: usize,
    pub rule: QuadratureRule,
}

impl GridSpec {
    pub fn midpoint(nodes: usize) -> Self {
        Self { nodes, rule: QuadratureRule::Midpoint }
    }

    pub fn gauss(nodes: usize) -> Self {
        Self { nodes, rule: QuadratureRule::GaussLegendre }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Integrator {
    MonteCarlo { budget: u64, key: StreamKey },
    Grid(GridSpec),
}

impl Integrator {
    pub fn mc(budget: u64, seed: u64) -> Self {
        Self::MonteCarlo { budget, key: StreamKey::new(seed, 0) }
    }

    /// Same backend on an independent stream (grids are unaffected).
    pub fn child(&self, tag: u64) -> Self {
        match *self {
            Self::MonteCarlo { budget, key } => Self::MonteCarlo { budget, key: key.child(tag) },
            g => g,
        }
    }
}

/// Mean of `budget` i.i.d. draws of `f`, sharded over child streams of `key`.
pub fn mc_mean<F>(budget: u64, key: StreamKey, f: F) -> MCEstimate
where
    F: Fn(&mut StreamRng) -> f64 + Sync,
{
    let shards = budget.div_ceil(SHARD_SIZE);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let n = SHARD_SIZE.min(budget - s * SHARD_SIZE);
            let mut rng = key.child(s).rng();
            let mut m = Moments::default();
            for _ in 0..n {
                m.push(f(&mut rng));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::default(), Moments::merge).estimate()
}

pub(crate) fn check_grid_dim(d: usize, vars: usize) -> Result<()> {
    if d * vars > MAX_GRID_DIM {
        return Err(Error::GridDimension { requested: d * vars, max: MAX_GRID_DIM });
    }
    Ok(())
}

/// `sum over m-tuples of nodes of (prod w) f(tuple)`, reduced in a fixed order.
pub fn grid_sum<F>(nodes: &[(MarkedPoint, f64)], m: usize, f: F) -> f64
where
    F: Fn(&[MarkedPoint]) -> f64 + Sync,
{
    if m == 0 {
        return f(&[]);
    }
    let n = nodes.len();
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut args = vec![nodes[first].0; m];
            let mut idx = vec![0usize; m - 1];
            let mut acc = 0.0;
            loop {
                let mut w = nodes[first].1;
                for (a, &i) in idx.iter().enumerate() {
                    args[a + 1] = nodes[i].0;
                    w *= nodes[i].1;
                }
                if w != 0.0 {
                    acc += w * f(&args);
                }
                let mut pos = 0;
                loop {
                    if pos == m - 1 {
                        return acc;
                    }
                    idx[pos] += 1;
                    if idx[pos] < n {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
            }
        })
        .collect();
    partial.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mc_is_worker_count_independent() {
        let f = |r: &mut StreamRng| r.random::<f64>();
        let a = mc_mean(50_000, StreamKey::new(3, 1), f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| mc_mean(50_000, StreamKey::new(3, 1), f));
        assert_eq!(a, b);
        assert!(a.within(0.5, 4.0));
        assert_eq!(a.n_samples, 50_000);
    }

    #[test]
    fn grid_volume() {
        let c = Control::on_window(Window::cube(2, 1.0).unwrap(), 3.0, MarkDistribution::None).unwrap();
        let nodes = c.grid_nodes(None, None, &GridSpec::gauss(4)).unwrap();
        let v = grid_sum(&nodes, 1, |_| 1.0);
        assert!((v - 12.0).abs() < 1e-12);
        let v2 = grid_sum(&nodes, 2, |x| x[0].coords[0] * x[0].coords[0] * x[1].coords[1] * x[1].coords[1]);
        // (3 * int x^2 over [-1,1]^2)^2 = (3 * 4/3)^2
        assert!((v2 - 16.0).abs() < 1e-12);
    }

    #[test]
    fn full_space_needs_anchor() {
        let c = Control::full_space(1, 1.0, MarkDistribution::None).unwrap();
        assert!(c.mass().is_err());
        assert!(c.check_inner(false, Some(1.0)).is_err());
        assert!(c.check_inner(true, None).is_err());
        assert!(c.check_inner(true, Some(1.0)).is_ok());
    }

    #[test]
    fn anchored_draw_is_unbiased() {
        // int over [-1,1] of 1{|z - 0.9| <= 0.5} dz = 0.6
        let c = Control::lebesgue(Window::cube(1, 1.0).unwrap());
        let a = MarkedPoint::at(0.9);
        let e = mc_mean(20_000, StreamKey::new(1, 2), |r| {
            let (z, w) = c.draw_free(Some(&a), Some(0.5), r);
            w * f64::from((z.coords[0] - 0.9).abs() <= 0.5)
        });
        assert!((e.value - 0.6).abs() < 1e-12);
    }
}

use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::kernel_algebra::integrate::{Control, GridSpec};
use crate::point_process::{MarkedPoint, MAX_DIM};
use crate::rng::{StreamKey, StreamRng};

pub type KernelFn = Arc<dyn Fn(&[MarkedPoint]) -> f64 + Send + Sync>;

/// A function of `order` marked points with an unbiased randomized
/// evaluation. Exact kernels, chaos projections and contractions all
/// implement it, so norms and contractions compose without squaring
/// pointwise estimates.
pub trait RandomizedKernel: Send + Sync {
    fn order(&self) -> usize;

    /// Vanishes whenever some pairwise spatial distance exceeds this.
    fn interaction_radius(&self) -> Option<f64>;

    /// One unbiased draw of the value at `args`.
    fn draw(&self, args: &[MarkedPoint], rng: &mut StreamRng) -> f64;

    /// Deterministic value at `args` with inner integrals done on `grid`.
    fn quadrature(&self, args: &[MarkedPoint], grid: &GridSpec) -> Result<f64>;

    /// True when `draw` is deterministic.
    fn is_exact(&self) -> bool {
        false
    }
}

/// A symmetric real function of `order` marked points.
#[derive(Clone)]
pub struct Kernel {
    order: usize,
    f: KernelFn,
    pub interaction_radius: Option<f64>,
    pub stationary: bool,
    pub symmetric: bool,
    /// Declared `sup |h|`, used for envelope checks.
    pub bound: Option<f64>,
    pub name: String,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("interaction_radius", &self.interaction_radius)
            .field("stationary", &self.stationary)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl Kernel {
    /// A symmetric kernel with no other declared structure.
    pub fn new(order: usize, name: impl Into<String>, f: impl Fn(&[MarkedPoint]) -> f64 + Send + Sync + 'static) -> Self {
        assert!(order >= 1, "kernel order must be positive");
        Self { order, f: Arc::new(f), interaction_radius: None, stationary: false, symmetric: true, bound: None, name: name.into() }
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.interaction_radius = Some(r);
        self
    }

    pub fn stationary(mut self) -> Self {
        self.stationary = true;
        self
    }

    pub fn asymmetric(mut self) -> Self {
        self.symmetric = false;
        self
    }

    pub fn with_bound(mut self, b: f64) -> Self {
        self.bound = Some(b);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn eval(&self, args: &[MarkedPoint]) -> f64 {
        debug_assert_eq!(args.len(), self.order);
        (self.f)(args)
    }

    /// Value of the stationary factorization `h_bar(t_2 - t_1, ..., m)`:
    /// the kernel with its first location moved to the origin.
    pub fn eval_bar(&self, args: &[MarkedPoint]) -> f64 {
        let mut shifted = args.to_vec();
        let mut t = args[0].coords;
        for c in t.iter_mut() {
            *c = -*c;
        }
        for p in shifted.iter_mut() {
            *p = p.translated(&t);
        }
        self.eval(&shifted)
    }

    /// `x -> gamma * h(alpha x)` (spatial coordinates only).
    pub fn rescaled(&self, gamma: f64, alpha: f64) -> Self {
        let f = self.f.clone();
        let mut k = Self {
            f: Arc::new(move |args: &[MarkedPoint]| {
                let s: Vec<MarkedPoint> = args.iter().map(|p| p.scaled(alpha)).collect();
                gamma * f(&s)
            }),
            name: format!("{}*{gamma}(x{alpha})", self.name),
            ..self.clone()
        };
        k.interaction_radius = self.interaction_radius.map(|r| r / alpha.abs());
        k.bound = self.bound.map(|b| b * gamma.abs());
        k
    }

    /// `|h|`.
    pub fn abs(&self) -> Self {
        let f = self.f.clone();
        Self { f: Arc::new(move |a: &[MarkedPoint]| f(a).abs()), name: format!("|{}|", self.name), ..self.clone() }
    }

    /// `h^2`, used for direct norm checks.
    pub fn squared(&self) -> Self {
        let f = self.f.clone();
        Self {
            f: Arc::new(move |a: &[MarkedPoint]| {
                let v = f(a);
                v * v
            }),
            name: format!("{}^2", self.name),
            bound: self.bound.map(|b| b * b),
            ..self.clone()
        }
    }

    /// Randomized probes of the declared flags. Returns one message per
    /// violated flag; empty when every probe passes.
    pub fn probe_flags(&self, control: &Control, probes: usize, key: StreamKey) -> Result<Vec<String>> {
        let mut rng = key.rng();
        let mut findings = Vec::new();
        let d = control.dim();
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        for _ in 0..probes {
            let args = self.probe_args(control, &mut rng)?;
            let v = self.eval(&args);
            if self.symmetric {
                let mut perm = args.clone();
                perm.shuffle(&mut rng);
                let w = self.eval(&perm);
                if !close(v, w) {
                    findings.push(format!("{}: not symmetric ({v} vs {w})", self.name));
                }
            }
            if self.stationary {
                let mut t = [0.0; MAX_DIM];
                for c in t.iter_mut().take(d) {
                    *c = rng.random_range(-10.0..10.0);
                }
                let moved: Vec<MarkedPoint> = args.iter().map(|p| p.translated(&t)).collect();
                let w = self.eval(&moved);
                if !close(v, w) {
                    findings.push(format!("{}: not stationary ({v} vs {w})", self.name));
                }
            }
            if let Some(r) = self.interaction_radius {
                if self.order >= 2 {
                    let mut far = args.clone();
                    let mut t = [0.0; MAX_DIM];
                    t[0] = r * (1.0 + rng.random::<f64>()) + 1e-9;
                    far[self.order - 1] = far[0].translated(&t);
                    if self.eval(&far) != 0.0 {
                        findings.push(format!("{}: nonzero beyond interaction radius {r}", self.name));
                    }
                }
            }
        }
        findings.dedup();
        Ok(findings)
    }

    fn probe_args(&self, control: &Control, rng: &mut StreamRng) -> Result<Vec<MarkedPoint>> {
        match control.window() {
            Ok(_) => (0..self.order).map(|_| control.sample(rng)).collect(),
            Err(_) => {
                // cluster around the origin so radius-limited kernels are exercised
                let scale = self.interaction_radius.unwrap_or(1.0);
                Ok((0..self.order)
                    .map(|_| {
                        let mut c = [0.0; MAX_DIM];
                        for x in c.iter_mut().take(control.dim()) {
                            *x = rng.random_range(-0.5..0.5) * scale;
                        }
                        MarkedPoint { coords: c, mark: control.marks.sample(rng) }
                    })
                    .collect())
            }
        }
    }

    pub fn validate_order(&self, expected: usize) -> Result<()> {
        if self.order != expected {
            return Err(invalid("kernel.order", format!("expected {expected}, got {}", self.order)));
        }
        Ok(())
    }
}

impl RandomizedKernel for Kernel {
    fn order(&self) -> usize {
        self.order
    }

    fn interaction_radius(&self) -> Option<f64> {
        self.interaction_radius
    }

    fn draw(&self, args: &[MarkedPoint], _rng: &mut StreamRng) -> f64 {
        self.eval(args)
    }

    fn quadrature(&self, args: &[MarkedPoint], _grid: &GridSpec) -> Result<f64> {
        Ok(self.eval(args))
    }

    fn is_exact(&self) -> bool {
        true
    }
}

/// Kernels used throughout the tests and experiments.
pub mod catalog {
    use super::*;

    /// `h = c`.
    pub fn constant(order: usize, c: f64) -> Kernel {
        Kernel::new(order, format!("const({c})"), move |_| c).stationary().with_bound(c.abs())
    }

    /// `1{|x - y| <= t}`.
    pub fn pair_indicator(t: f64) -> Kernel {
        Kernel::new(2, format!("1{{|x-y|<={t}}}"), move |a| f64::from(a[0].dist(&a[1]) <= t)).with_radius(t).stationary().with_bound(1.0)
    }

    /// Edge count `1{|x - y| <= t} / 2`, so the ordered sum counts each edge once.
    pub fn edge_count(t: f64) -> Kernel {
        Kernel::new(2, format!("edge({t})"), move |a| 0.5 * f64::from(a[0].dist(&a[1]) <= t)).with_radius(t).stationary().with_bound(0.5)
    }

    /// `+1` when `x_1 x_2 >= 0`, `-1` otherwise (first coordinate).
    pub fn sign() -> Kernel {
        Kernel::new(2, "sign", |a| if a[0].coords[0] * a[1].coords[0] >= 0.0 { 1.0 } else { -1.0 }).with_bound(1.0)
    }

    /// `x_1 x_2` (first coordinate).
    pub fn product() -> Kernel {
        Kernel::new(2, "product", |a| a[0].coords[0] * a[1].coords[0])
    }

    /// `1{all pairwise distances <= t}` of order `k`.
    pub fn clique_indicator(k: usize, t: f64) -> Kernel {
        Kernel::new(k, format!("clique{k}({t})"), move |a| {
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    if a[i].dist(&a[j]) > t {
                        return 0.0;
                    }
                }
            }
            1.0
        })
        .with_radius(t)
        .stationary()
        .with_bound(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_process::{MarkDistribution, Window};

    #[test]
    fn catalog_flags_hold() {
        let c = Control::on_window(Window::cube(1, 1.0).unwrap(), 1.0, MarkDistribution::None).unwrap();
        for k in [
            catalog::constant(3, 2.0),
            catalog::pair_indicator(0.3),
            catalog::edge_count(0.5),
            catalog::sign(),
            catalog::product(),
            catalog::clique_indicator(3, 0.7),
        ] {
            let f = k.probe_flags(&c, 30, StreamKey::new(1, 0)).unwrap();
            assert!(f.is_empty(), "{f:?}");
        }
    }

    #[test]
    fn probes_catch_false_flags() {
        let c = Control::lebesgue(Window::cube(1, 1.0).unwrap());
        let bad = Kernel::new(2, "x1", |a| a[0].coords[0]).stationary().with_radius(0.1);
        let f = bad.probe_flags(&c, 30, StreamKey::new(2, 0)).unwrap();
        assert!(f.iter().any(|s| s.contains("symmetric")));
        assert!(f.iter().any(|s| s.contains("stationary")));
        assert!(f.iter().any(|s| s.contains("radius")));
    }

    #[test]
    fn rescaling_and_bar() {
        let h = catalog::pair_indicator(1.0);
        let f = h.rescaled(3.0, 2.0);
        let a = [MarkedPoint::at(0.0), MarkedPoint::at(0.4)];
        assert_eq!(f.eval(&a), 3.0);
        let b = [MarkedPoint::at(0.0), MarkedPoint::at(0.6)];
        assert_eq!(f.eval(&b), 0.0);
        assert_eq!(f.interaction_radius, Some(0.5));
        let s = [MarkedPoint::at(5.0), MarkedPoint::at(5.5)];
        assert_eq!(h.eval_bar(&s), 1.0);
    }
}

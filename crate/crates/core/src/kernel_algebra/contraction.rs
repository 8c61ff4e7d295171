use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::chaos_kernel::MAX_ARGS;
use crate::kernel_algebra::estimate::MCEstimate;
use crate::kernel_algebra::integrate::{check_grid_dim, grid_sum, mc_mean, Control, GridSpec, Integrator};
use crate::kernel_algebra::kernel::RandomizedKernel;
use crate::point_process::MarkedPoint;
use crate::rng::StreamRng;

pub(crate) fn check_indices(p: usize, q: usize, r: usize, l: usize) -> Result<()> {
    if !(l <= r && r <= p.min(q)) {
        return Err(Error::ContractionIndex { p, q, r, l });
    }
    Ok(())
}

/// `h *_r^l g (x_{p-r}, x'_{q-r}, y_{r-l}) = int h(x, y, z) g(x', y, z) dmu^l(z)`.
///
/// Arguments are laid out as `(x, x', y)`.
#[derive(Clone)]
pub struct Contraction {
    h: Arc<dyn RandomizedKernel>,
    g: Arc<dyn RandomizedKernel>,
    p: usize,
    q: usize,
    r: usize,
    l: usize,
    control: Control,
    integrator: Integrator,
    /// (position of the anchor argument, radius used around it)
    anchor: Option<(usize, Option<f64>)>,
}

impl Contraction {
    pub fn new(
        h: Arc<dyn RandomizedKernel>,
        g: Arc<dyn RandomizedKernel>,
        r: usize,
        l: usize,
        control: Control,
        integrator: Integrator,
    ) -> Result<Self> {
        let (p, q) = (h.order(), g.order());
        check_indices(p, q, r, l)?;
        if p + q - r - l > MAX_ARGS {
            return Err(invalid("order", "contraction has too many arguments"));
        }
        // z-variables are tied to every fixed argument of h, and of g
        let h_fixed = if p > r {
            Some(0)
        } else if r > l {
            Some(p + q - 2 * r)
        } else {
            None
        };
        let g_fixed = if q > r {
            Some(p - r)
        } else if r > l {
            Some(p + q - 2 * r)
        } else {
            None
        };
        let candidates = [(h_fixed, h.interaction_radius()), (g_fixed, g.interaction_radius())];
        let anchor = candidates
            .iter()
            .find(|(a, rad)| a.is_some() && rad.is_some())
            .or_else(|| candidates.iter().find(|(a, _)| a.is_some()))
            .map(|(a, rad)| (a.unwrap(), *rad));
        if l > 0 {
            control.check_inner(anchor.is_some(), anchor.and_then(|a| a.1))?;
        }
        Ok(Self { h, g, p, q, r, l, control, integrator, anchor })
    }

    pub fn indices(&self) -> (usize, usize, usize, usize) {
        (self.p, self.q, self.r, self.l)
    }

    fn split<'a>(&self, args: &'a [MarkedPoint]) -> (&'a [MarkedPoint], &'a [MarkedPoint], &'a [MarkedPoint]) {
        let (x, rest) = args.split_at(self.p - self.r);
        let (xp, y) = rest.split_at(self.q - self.r);
        (x, xp, y)
    }

    fn assemble(&self, args: &[MarkedPoint], z: &[MarkedPoint]) -> ([MarkedPoint; MAX_ARGS], [MarkedPoint; MAX_ARGS]) {
        let (x, xp, y) = self.split(args);
        let mut hb = [MarkedPoint::default(); MAX_ARGS];
        let mut gb = [MarkedPoint::default(); MAX_ARGS];
        let mut i = 0;
        for p in x.iter().chain(y).chain(z) {
            hb[i] = *p;
            i += 1;
        }
        i = 0;
        for p in xp.iter().chain(y).chain(z) {
            gb[i] = *p;
            i += 1;
        }
        (hb, gb)
    }

    /// Estimate of the contraction at `args`. Exact when `l = 0` and both
    /// factors are exact, or under a grid integrator.
    pub fn eval(&self, args: &[MarkedPoint]) -> Result<MCEstimate> {
        let n = self.order();
        if args.len() != n {
            return Err(invalid("args", format!("expected {n} points, got {}", args.len())));
        }
        if self.l == 0 && self.h.is_exact() && self.g.is_exact() {
            let mut rng = crate::rng::StreamKey::new(0, 0).rng();
            return Ok(MCEstimate::exact(self.draw(args, &mut rng)));
        }
        match self.integrator {
            Integrator::MonteCarlo { budget, key } => Ok(mc_mean(budget, key, |rng| self.draw(args, rng))),
            Integrator::Grid(g) => Ok(MCEstimate::exact(self.quadrature(args, &g)?)),
        }
    }
}

impl RandomizedKernel for Contraction {
    fn order(&self) -> usize {
        self.p + self.q - self.r - self.l
    }

    fn interaction_radius(&self) -> Option<f64> {
        match (self.h.interaction_radius(), self.g.interaction_radius()) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        }
    }

    fn draw(&self, args: &[MarkedPoint], rng: &mut StreamRng) -> f64 {
        let mut z = [MarkedPoint::default(); MAX_ARGS];
        let mut w = 1.0;
        let anchor = self.anchor.map(|(i, rad)| (args[i], rad));
        for slot in z.iter_mut().take(self.l) {
            let (pt, wz) = self.control.draw_free(anchor.as_ref().map(|a| &a.0), anchor.and_then(|a| a.1), rng);
            if wz == 0.0 {
                return 0.0;
            }
            *slot = pt;
            w *= wz;
        }
        let (hb, gb) = self.assemble(args, &z[..self.l]);
        let hv = self.h.draw(&hb[..self.p], rng);
        if hv == 0.0 {
            return 0.0;
        }
        w * hv * self.g.draw(&gb[..self.q], rng)
    }

    fn quadrature(&self, args: &[MarkedPoint], grid: &GridSpec) -> Result<f64> {
        if self.l == 0 {
            let (hb, gb) = self.assemble(args, &[]);
            return Ok(self.h.quadrature(&hb[..self.p], grid)? * self.g.quadrature(&gb[..self.q], grid)?);
        }
        check_grid_dim(self.control.dim(), self.l)?;
        let anchor = self.anchor.map(|(i, rad)| (args[i], rad));
        let nodes = self.control.grid_nodes(anchor.as_ref().map(|a| &a.0), anchor.and_then(|a| a.1), grid)?;
        let err = std::sync::Mutex::new(None);
        let s = grid_sum(&nodes, self.l, |z| {
            let (hb, gb) = self.assemble(args, z);
            match (self.h.quadrature(&hb[..self.p], grid), self.g.quadrature(&gb[..self.q], grid)) {
                (Ok(a), Ok(b)) => a * b,
                (Err(e), _) | (_, Err(e)) => {
                    *err.lock().unwrap() = Some(e);
                    0.0
                }
            }
        });
        if let Some(e) = err.into_inner().unwrap() {
            return Err(e);
        }
        Ok(s)
    }

    fn is_exact(&self) -> bool {
        self.l == 0 && self.h.is_exact() && self.g.is_exact()
    }
}

/// The contraction `h *_r^l g` as a kernel with estimate-valued evaluation.
pub fn contract(
    h: Arc<dyn RandomizedKernel>,
    g: Arc<dyn RandomizedKernel>,
    r: usize,
    l: usize,
    control: &Control,
    integrator: Integrator,
) -> Result<Contraction> {
    Contraction::new(h, g, r, l, control.clone(), integrator)
}

//! U-statistics over point configurations and their chaos decomposition.

mod chaos;

pub use chaos::{chaos_moments, detect_hoeffding_rank, project_kernel, ChaosDecomposition, LevelTerm, RankReport};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::{factorial, Kernel};
use crate::neighbors::{for_each_clique, forward_neighbors};
use crate::point_process::{MarkedPoint, PointConfiguration};

/// Largest order the tuple enumerators accept.
pub const MAX_ENUMERATION_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceleration {
    BruteForce,
    /// Cell grid of side `interaction_radius`; only tuples whose points are
    /// pairwise within the radius are visited.
    Grid,
}

/// `F = sum over ordered k-tuples of distinct points of h`.
///
/// Terms are accumulated subset by subset in lexicographic order (and, for
/// asymmetric kernels, permutation by permutation in lexicographic order
/// inside a subset), so both accelerations return bit-identical sums.
#[derive(Debug, Clone)]
pub struct UStatistic {
    pub kernel: Kernel,
    pub acceleration: Acceleration,
}

impl UStatistic {
    pub fn new(kernel: Kernel, acceleration: Acceleration) -> Result<Self> {
        if acceleration == Acceleration::Grid && kernel.interaction_radius.is_none() {
            return Err(invalid("acceleration", "grid acceleration needs a kernel interaction radius"));
        }
        Ok(Self { kernel, acceleration })
    }

    pub fn brute_force(kernel: Kernel) -> Self {
        Self { kernel, acceleration: Acceleration::BruteForce }
    }

    pub fn grid(kernel: Kernel) -> Result<Self> {
        Self::new(kernel, Acceleration::Grid)
    }

    pub fn order(&self) -> usize {
        self.kernel.order()
    }

    pub fn evaluate(&self, config: &PointConfiguration) -> Result<f64> {
        self.evaluate_points(&config.points, config.dim())
    }

    pub fn evaluate_points(&self, points: &[MarkedPoint], dim: usize) -> Result<f64> {
        let k = self.kernel.order();
        if k > MAX_ENUMERATION_ORDER {
            return Err(Error::OrderTooLarge { order: k, max: MAX_ENUMERATION_ORDER });
        }
        if points.len() < k {
            return Ok(0.0);
        }
        let mut acc = SubsetAccumulator::new(&self.kernel);
        match self.acceleration {
            Acceleration::BruteForce => for_each_subset(points.len(), k, |s| acc.add(points, s)),
            Acceleration::Grid => {
                let r = self.kernel.interaction_radius.expect("checked at construction");
                let fwd = forward_neighbors(points, dim, r);
                for_each_clique(&fwd, k, |s| acc.add(points, s));
            }
        }
        Ok(acc.total)
    }
}

struct SubsetAccumulator<'a> {
    kernel: &'a Kernel,
    weight: f64,
    buf: Vec<MarkedPoint>,
    perm: Vec<usize>,
    total: f64,
}

impl<'a> SubsetAccumulator<'a> {
    fn new(kernel: &'a Kernel) -> Self {
        let k = kernel.order();
        Self { kernel, weight: factorial(k), buf: vec![MarkedPoint::default(); k], perm: (0..k).collect(), total: 0.0 }
    }

    fn add(&mut self, points: &[MarkedPoint], subset: &[usize]) {
        if self.kernel.symmetric {
            for (b, &i) in self.buf.iter_mut().zip(subset) {
                *b = points[i];
            }
            self.total += self.weight * self.kernel.eval(&self.buf);
            return;
        }
        for (i, p) in self.perm.iter_mut().enumerate() {
            *p = i;
        }
        loop {
            for (b, &i) in self.buf.iter_mut().zip(&self.perm) {
                *b = points[subset[i]];
            }
            self.total += self.kernel.eval(&self.buf);
            if !next_permutation(&mut self.perm) {
                break;
            }
        }
    }
}

/// Visits every increasing `k`-tuple of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

//! Marked Poisson point processes on centered boxes.

mod io;
mod marks;
mod sampling;
mod window;

use serde::{Deserialize, Serialize};

pub use io::{read_configuration, write_configuration};
pub use marks::MarkDistribution;
pub use sampling::{poisson_count, sample_poisson_pp, sample_poissonized_binomial, SpatialDensity};
pub use window::Window;

use crate::rng::StreamKey;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

/// Fixed-size coordinate storage; axes beyond the window dimension hold 0.
pub type Coords = [f64; MAX_DIM];

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub coords: Coords,
    pub mark: Option<f64>,
}

impl MarkedPoint {
    /// Panics if `location` has more than [`MAX_DIM`] entries.
    pub fn new(location: &[f64], mark: Option<f64>) -> Self {
        assert!(location.len() <= MAX_DIM, "dimension above {MAX_DIM}");
        let mut coords = [0.0; MAX_DIM];
        coords[..location.len()].copy_from_slice(location);
        Self { coords, mark }
    }

    pub fn at(x: f64) -> Self {
        Self::new(&[x], None)
    }

    pub fn with_mark(mut self, mark: f64) -> Self {
        self.mark = Some(mark);
        self
    }

    pub fn location(&self, dim: usize) -> &[f64] {
        &self.coords[..dim]
    }

    /// Mark value, or NaN for unmarked points.
    pub fn m(&self) -> f64 {
        self.mark.unwrap_or(f64::NAN)
    }

    pub fn dist_sq(&self, other: &Self) -> f64 {
        self.coords.iter().zip(other.coords.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.dist_sq(other).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn translated(&self, t: &Coords) -> Self {
        let mut p = *self;
        for (c, s) in p.coords.iter_mut().zip(t) {
            *c += s;
        }
        p
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut p = *self;
        for c in p.coords.iter_mut() {
            *c *= alpha;
        }
        p
    }
}

/// A realized configuration together with the law that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub window: Window,
    /// Intensity per unit volume. For poissonized binomial samples this is
    /// `n / volume`.
    pub intensity: f64,
    pub points: Vec<MarkedPoint>,
    pub seed: StreamKey,
}

impl PointConfiguration {
    pub fn new(window: Window, intensity: f64, points: Vec<MarkedPoint>, seed: StreamKey) -> Self {
        Self { window, intensity, points, seed }
    }

    /// Wraps bare points in a window (mostly for tests and hand examples).
    pub fn from_points(window: Window, points: Vec<MarkedPoint>) -> Self {
        Self::new(window, 1.0, points, StreamKey::new(0, 0))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn has_marks(&self) -> bool {
        self.points.iter().all(|p| p.mark.is_some())
    }

    /// Shifts every point by `t`; the window is left in place because every
    /// statistic in the crate depends on the points alone.
    pub fn translated(&self, t: &Coords) -> Self {
        Self { points: self.points.iter().map(|p| p.translated(t)).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let a = MarkedPoint::new(&[0.0, 0.0], None);
        let b = MarkedPoint::new(&[3.0, 4.0], Some(1.0));
        assert_eq!(a.dist(&b), 5.0);
        assert_eq!(b.norm(), 5.0);
        assert_eq!(b.m(), 1.0);
        assert!(a.m().is_nan());
    }
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::point_process::{Coords, MAX_DIM};

/// Centered axis-aligned box `[-w_1, w_1] x ... x [-w_d, w_d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    dim: usize,
    half_width: Vec<f64>,
}

impl Window {
    pub fn new(half_width: Vec<f64>) -> Result<Self> {
        let dim = half_width.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(invalid("dim", format!("must lie in 1..={MAX_DIM}, got {dim}")));
        }
        if let Some(w) = half_width.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid("half_width", format!("must be finite and positive, got {w}")));
        }
        Ok(Self { dim, half_width })
    }

    /// The cube `[-w, w]^d`.
    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        Self::new(vec![half_width; dim])
    }

    /// The centered cube of volume one.
    pub fn unit_volume(dim: usize) -> Result<Self> {
        Self::cube(dim, 0.5)
    }

    /// `X_lambda = [-lambda^{1/d}, lambda^{1/d}]^d`, the growing window of the
    /// stationary applications.
    pub fn growing(dim: usize, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        Self::cube(dim, lambda.powf(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> &[f64] {
        &self.half_width
    }

    pub fn volume(&self) -> f64 {
        self.half_width.iter().map(|w| 2.0 * w).product()
    }

    /// The window dilated by `alpha > 0`.
    pub fn dilated(&self, alpha: f64) -> Result<Self> {
        Self::new(self.half_width.iter().map(|w| w * alpha).collect())
    }

    pub fn contains(&self, x: &Coords) -> bool {
        self.half_width.iter().zip(x.iter()).all(|(w, xi)| xi.abs() <= *w) && x[self.dim..].iter().all(|c| *c == 0.0)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Coords {
        let mut c = [0.0; MAX_DIM];
        for (ci, w) in c.iter_mut().zip(&self.half_width) {
            *ci = w * (2.0 * rng.random::<f64>() - 1.0);
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate() {
        assert!(Window::new(vec![]).is_err());
        assert!(Window::new(vec![1.0, 0.0]).is_err());
        assert!(Window::new(vec![f64::NAN]).is_err());
        assert!(Window::new(vec![1.0; MAX_DIM + 1]).is_err());
    }

    #[test]
    fn volumes() {
        assert_eq!(Window::unit_volume(3).unwrap().volume(), 1.0);
        let w = Window::growing(2, 16.0).unwrap();
        assert_eq!(w.half_width(), &[4.0, 4.0]);
        assert_eq!(w.volume(), 64.0);
    }

    #[test]
    fn symmetric_contains_origin() {
        let w = Window::new(vec![0.5, 2.0]).unwrap();
        assert!(w.contains(&[0.0; MAX_DIM]));
        assert!(w.contains(&[-0.5, 2.0, 0.0, 0.0]));
        assert!(!w.contains(&[0.6, 0.0, 0.0, 0.0]));
    }
}

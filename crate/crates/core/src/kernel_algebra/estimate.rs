use std::fmt;

use serde::{Deserialize, Serialize};

/// A value with its standard error. `std_error == 0` marks exact results
/// (quadrature, closed forms, degenerate integrands).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

impl fmt::Display for MCEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {} (n = {})", self.value, self.std_error, self.n_samples)
    }
}

impl MCEstimate {
    pub const ZERO: Self = Self::exact(0.0);

    pub const fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, n_samples: 0 }
    }

    pub fn is_exact(&self) -> bool {
        self.std_error == 0.0
    }

    pub fn relative_se(&self) -> f64 {
        if self.std_error == 0.0 {
            0.0
        } else {
            self.std_error / self.value.abs()
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self { value: self.value * c, std_error: self.std_error * c.abs(), n_samples: self.n_samples }
    }

    /// Sum of two independent estimates.
    pub fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            std_error: self.std_error.hypot(other.std_error),
            n_samples: self.n_samples + other.n_samples,
        }
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.scale(-1.0))
    }

    /// Delta-method square root. A non-positive estimate maps to 0 with
    /// error `sqrt(std_error)`, the size of root still compatible with it.
    pub fn sqrt(self) -> Self {
        if self.value <= 0.0 {
            return Self { value: 0.0, std_error: self.std_error.sqrt(), n_samples: self.n_samples };
        }
        let r = self.value.sqrt();
        Self { value: r, std_error: self.std_error / (2.0 * r), n_samples: self.n_samples }
    }

    /// `|value - target| <= k * std_error`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }

    /// Largest estimate by value; ties keep the first.
    pub fn max_of<I: IntoIterator<Item = Self>>(it: I) -> Option<Self> {
        it.into_iter().fold(None, |best, e| match best {
            Some(b) if b.value >= e.value => Some(b),
            _ => Some(e),
        })
    }
}

/// Streaming mean/variance (Welford), mergeable in a fixed order (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Self { n, mean, m2 }
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn estimate(&self) -> MCEstimate {
        MCEstimate { value: self.mean, std_error: (self.variance() / self.n.max(1) as f64).sqrt(), n_samples: self.n }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<T: IntoIterator<Item = f64>>(iter: T) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.3).collect();
        let whole: Moments = xs.iter().copied().collect();
        let a: Moments = xs[..313].iter().copied().collect();
        let b: Moments = xs[313..].iter().copied().collect();
        let m = a.merge(b);
        assert_eq!(m.n, whole.n);
        assert!((m.mean - whole.mean).abs() < 1e-12);
        assert!((m.variance() - whole.variance()).abs() < 1e-9);
    }

    #[test]
    fn sqrt_delta_method() {
        let e = MCEstimate { value: 4.0, std_error: 0.4, n_samples: 10 }.sqrt();
        assert_eq!(e.value, 2.0);
        assert!((e.std_error - 0.1).abs() < 1e-15);
        assert_eq!(MCEstimate { value: -0.01, std_error: 0.04, n_samples: 1 }.sqrt().value, 0.0);
    }

    #[test]
    fn display() {
        let s = MCEstimate { value: 1.5, std_error: 0.25, n_samples: 7 }.to_string();
        assert_eq!(s, "1.5 ± 0.25 (n = 7)");
    }
}

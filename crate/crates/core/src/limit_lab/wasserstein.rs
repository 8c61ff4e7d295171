use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{invalid, Result};

fn std_normal() -> Normal {
    Normal::standard()
}

/// Antiderivative of the standard normal distribution function,
/// `x Phi(x) + phi(x)`, vanishing at minus infinity.
fn cdf_antiderivative(n: &Normal, x: f64) -> f64 {
    x * n.cdf(x) + n.pdf(x)
}

/// `int_x^inf (1 - Phi)`.
fn upper_tail_integral(n: &Normal, x: f64) -> f64 {
    n.pdf(x) - x * n.sf(x)
}

/// `int_a^b |c - Phi(x)| dx` for a constant level `c in [0, 1]`.
fn abs_gap(n: &Normal, c: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let piece = |lo: f64, hi: f64| c * (hi - lo) - (cdf_antiderivative(n, hi) - cdf_antiderivative(n, lo));
    // Phi crosses c at most once
    let z = n.inverse_cdf(c);
    if z <= a {
        -piece(a, b)
    } else if z >= b {
        piece(a, b)
    } else {
        piece(a, z) - piece(z, b)
    }
}

/// Exact Wasserstein-1 distance between the empirical law of `values` and
/// `N(0, 1)`, `int |F_n - Phi|`, integrated piecewise between order
/// statistics.
pub fn wasserstein1_to_std_gaussian(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(invalid("samples", "empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("samples", "non-finite value"));
    }
    let n = std_normal();
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let len = xs.len() as f64;
    let mut total = cdf_antiderivative(&n, xs[0]) + upper_tail_integral(&n, xs[xs.len() - 1]);
    for (i, w) in xs.windows(2).enumerate() {
        total += abs_gap(&n, (i + 1) as f64 / len, w[0], w[1]);
    }
    Ok(total)
}

/// Centers by the sample mean and divides by the sample standard deviation.
pub fn standardize(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(invalid("samples", "need at least two values"));
    }
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    if !(var > 0.0) {
        return Err(invalid("samples", "zero sample variance"));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - m) / sd).collect())
}

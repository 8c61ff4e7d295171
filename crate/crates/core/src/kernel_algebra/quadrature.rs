use serde::{Deserialize, Serialize};

/// One-dimensional rule on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Midpoint,
    GaussLegendre,
}

impl QuadratureRule {
    /// `(node, weight)` pairs on `[0, 1]`, weights summing to 1.
    pub fn unit_nodes(self, n: usize) -> Vec<(f64, f64)> {
        match self {
            Self::Midpoint => (0..n).map(|j| ((j as f64 + 0.5) / n as f64, 1.0 / n as f64)).collect(),
            Self::GaussLegendre => gauss_legendre(n).into_iter().map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect(),
        }
    }

    /// Nodes mapped onto `[a, b]`.
    pub fn nodes_on(self, n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.unit_nodes(n).into_iter().map(|(u, w)| (a + (b - a) * u, (b - a) * w)).collect()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`, started from the Tricomi approximation.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        out[i] = (-z, w);
        out[n - 1 - i] = (z, w);
    }
    out
}

/// Composite Gauss-Legendre integral of `f` on `[a, b]` split at `breaks`.
pub fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], panels: usize, order: usize) -> f64 {
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|x| *x > a && *x < b).collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let rule = gauss_legendre(order);
    let mut total = 0.0;
    for seg in cuts.windows(2) {
        let h = (seg[1] - seg[0]) / panels as f64;
        for p in 0..panels {
            let lo = seg[0] + p as f64 * h;
            for (x, w) in &rule {
                total += 0.5 * h * w * f(lo + 0.5 * h * (x + 1.0));
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        let nodes = gauss_legendre(5);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_with_breaks() {
        let v = integrate_1d(|x| if x < 0.3 { 1.0 } else { 2.0 }, 0.0, 1.0, &[0.3], 2, 8);
        assert!((v - 1.7).abs() < 1e-14);
    }

    #[test]
    fn midpoint_weights() {
        let n = QuadratureRule::Midpoint.nodes_on(4, -1.0, 1.0);
        assert_eq!(n[0], (-0.75, 0.5));
    }
}

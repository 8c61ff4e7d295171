use serde::Serialize;

use crate::error::{invalid, Result};

/// `E F^4 - 3 (E F^2)^2` of centered samples with a delta-method standard
/// error.
pub fn fourth_moment_gap(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 100 {
        return Err(invalid("samples", format!("need at least 100 values, got {}", values.len())));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for v in values {
        let y2 = (v - mean).powi(2);
        m2 += y2;
        m4 += y2 * y2;
    }
    m2 /= n;
    m4 /= n;
    // linearization: g = y^4 - 6 m2 y^2
    let gm = m4 - 6.0 * m2 * m2;
    let var = values
        .iter()
        .map(|v| {
            let y2 = (v - mean).powi(2);
            (y2 * y2 - 6.0 * m2 * y2 - gm).powi(2)
        })
        .sum::<f64>()
        / (n - 1.0);
    Ok((m4 - 3.0 * m2 * m2, (var / n).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub grid: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_se: f64,
}

/// Least squares of `log distance` on `log scale`.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(invalid("grid", format!("need at least 4 points, got {}", points.len())));
    }
    if points.iter().any(|(s, _)| !(s.is_finite() && *s > 0.0)) || points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("grid", "scales must be positive and increasing"));
    }
    if let Some((_, d)) = points.iter().find(|(_, d)| !(d.is_finite() && *d > 0.0)) {
        return Err(invalid("grid", format!("non-positive distance {d}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    let slope_se = (sse / (n - 2.0) / sxx).sqrt();
    Ok(RateFit { grid: points.to_vec(), slope, intercept, r_squared, slope_se })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceCheck {
    pub fit: RateFit,
    pub predicted: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Slope of `log Var` against `log scale`, compared with `predicted` up to
/// `tolerance`.
pub fn variance_asymptotics_check(points: &[(f64, f64)], replications: usize, predicted: f64, tolerance: f64) -> Result<VarianceCheck> {
    if replications < 2000 {
        return Err(invalid("replications", format!("need at least 2000, got {replications}")));
    }
    let fit = rate_fit(points)?;
    let holds = (fit.slope - predicted).abs() <= tolerance;
    Ok(VarianceCheck { fit, predicted, tolerance, holds })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_distr::{Distribution, Exp1, StandardNormal};

    use super::*;

    #[test]
    fn gap_oracles() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let z: Vec<f64> = (0..100_000).map(|_| -> f64 { StandardNormal.sample(&mut rng) }).collect();
        let (g, se) = fourth_moment_gap(&z).unwrap();
        assert!(g.abs() <= 4.0 * se, "{g} {se}");
        let r: Vec<f64> = (0..100_000).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let (g, se) = fourth_moment_gap(&r).unwrap();
        assert!((g + 2.0).abs() <= 4.0 * se.max(1e-3), "{g} {se}");
        let e: Vec<f64> = (0..200_000)
            .map(|_| {
                let x: f64 = Exp1.sample(&mut rng);
                x - 1.0
            })
            .collect();
        let (g, se) = fourth_moment_gap(&e).unwrap();
        assert!((g - 6.0).abs() <= 4.0 * se, "{g} {se}");
        let flipped: Vec<f64> = e.iter().map(|x| -x).collect();
        let (g2, se2) = fourth_moment_gap(&flipped).unwrap();
        assert!((g - g2).abs() < 1e-9 && (se - se2).abs() < 1e-9);
        assert!(fourth_moment_gap(&e[..99]).is_err());
    }

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [50.0f64, 100.0, 200.0, 400.0, 800.0].iter().map(|&l| (l, 3.0 * l.powf(-0.5))).collect();
        let f = rate_fit(&pts).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12 * 0.5);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, 0.2)).collect();
        assert_eq!(rate_fit(&flat).unwrap().slope, 0.0);
        let var: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, 7.0 * p.0)).collect();
        let v = variance_asymptotics_check(&var, 2000, 1.0, 0.15).unwrap();
        assert!((v.fit.slope - 1.0).abs() < 1e-12 && v.holds);
        assert!(rate_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
        assert!(rate_fit(&pts[..3]).is_err());
    }
}

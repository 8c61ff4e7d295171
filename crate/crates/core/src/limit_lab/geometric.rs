//! Non-central limit of the sign-kernel U-statistic on `[-1, 1]`.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kernel_algebra::{MCEstimate, Moments};
use crate::point_process::{sample_poisson_pp, MarkDistribution, MarkedPoint, Window};
use crate::rng::{replicate, StreamKey};

/// `sum_{i != j} sign(x_i x_j)` over the first coordinate, via
/// `(P - N)^2 - (P + N)` with `P` counting `x >= 0`.
///
/// Agrees with the ordered U-statistic of the sign kernel whenever no point
/// sits exactly at the origin.
pub fn sign_statistic(points: &[MarkedPoint]) -> f64 {
    let pos = points.iter().filter(|p| p.coords[0] >= 0.0).count() as f64;
    let neg = points.len() as f64 - pos;
    (pos - neg).powi(2) - (pos + neg)
}

fn moment(values: &[f64], p: i32) -> MCEstimate {
    values.iter().map(|v| v.powi(p)).collect::<Moments>().estimate()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentPoint {
    pub lambda: f64,
    pub replications: usize,
    /// `E[lambda^-1 F]`, exactly 0 in expectation.
    pub mean: MCEstimate,
    pub second: MCEstimate,
    pub third: MCEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricLimitReport {
    pub points: Vec<MomentPoint>,
    /// Moments of `2 (xi^2 - 1)` from direct sampling.
    pub limit_second: MCEstimate,
    pub limit_third: MCEstimate,
    pub limit_draws: usize,
}

/// `lambda^-1 F_lambda` for one Poisson sample of intensity `lambda` on `[-1, 1]`.
pub fn scaled_sign_sample(lambda: f64, key: StreamKey) -> Result<f64> {
    let w = Window::cube(1, 1.0)?;
    let cfg = sample_poisson_pp(&w, lambda, &MarkDistribution::None, key)?;
    Ok(sign_statistic(&cfg.points) / lambda)
}

/// Draws of the limit law `2 (xi^2 - 1)`.
pub fn sample_limit_law(draws: usize, key: StreamKey) -> Vec<f64> {
    let mut rng = key.rng();
    (0..draws)
        .map(|_| {
            let xi: f64 = StandardNormal.sample(&mut rng);
            2.0 * (xi * xi - 1.0)
        })
        .collect()
}

/// Empirical mean, second and third moments of `lambda^-1 F_lambda` along
/// `lambdas`, next to those of the limit law.
pub fn geometric_limit_check(lambdas: &[f64], replications: usize, limit_draws: usize, seed: u64) -> Result<GeometricLimitReport> {
    if lambdas.is_empty() || lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(invalid("lambda_grid", "need positive intensities"));
    }
    if replications < 2 {
        return Err(invalid("replications", "need at least 2"));
    }
    let mut points = Vec::new();
    for (g, &lambda) in lambdas.iter().enumerate() {
        let values = replicate(replications as u64, seed ^ ((g as u64 + 1) << 32), |key| scaled_sign_sample(lambda, key))?;
        points.push(MomentPoint { lambda, replications, mean: moment(&values, 1), second: moment(&values, 2), third: moment(&values, 3) });
    }
    let limit = sample_limit_law(limit_draws, StreamKey::new(seed, u64::MAX));
    Ok(GeometricLimitReport { points, limit_second: moment(&limit, 2), limit_third: moment(&limit, 3), limit_draws })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_algebra::catalog;
    use crate::ustat::UStatistic;

    #[test]
    fn identity_matches_ustat() {
        let w = Window::cube(1, 1.0).unwrap();
        for s in 0..10 {
            let cfg = sample_poisson_pp(&w, 15.0, &MarkDistribution::None, StreamKey::new(s, 1)).unwrap();
            let u = UStatistic::brute_force(catalog::sign()).evaluate(&cfg).unwrap();
            assert_eq!(u, sign_statistic(&cfg.points));
        }
    }

    #[test]
    fn limit_law_moments() {
        let r = geometric_limit_check(&[50.0], 2000, 1_000_000, 7).unwrap();
        assert!(r.limit_second.within(8.0, 4.0), "{}", r.limit_second);
        assert!(r.limit_third.within(64.0, 4.0), "{}", r.limit_third);
        assert!(r.points[0].mean.within(0.0, 4.0));
    }
}

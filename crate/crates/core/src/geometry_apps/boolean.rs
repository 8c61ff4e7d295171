//! Boolean model with ball grains: weighted edge mass and its mean density.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::{integrate_1d, mc_mean, sphere_area, Kernel, MCEstimate};
use crate::neighbors::forward_neighbors_by;
use crate::point_process::{MarkDistribution, MarkedPoint, PointConfiguration};
use crate::rng::StreamKey;

/// Even weight `phi(x - y)`, a function of the distance only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi {
    Zero,
    /// `|x|^beta`.
    Power {
        beta: f64,
    },
    /// `1{|x| <= radius}`.
    Indicator {
        radius: f64,
    },
}

impl Phi {
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Phi::Zero => 0.0,
            Phi::Power { beta } => r.powf(beta),
            Phi::Indicator { radius } => f64::from(r <= radius),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Phi::Zero => Ok(()),
            Phi::Power { beta } if beta.is_finite() => Ok(()),
            Phi::Indicator { radius } if radius.is_finite() && radius >= 0.0 => Ok(()),
            _ => Err(invalid("phi", format!("bad parameters {self:?}"))),
        }
    }
}

#[inline]
fn grains_meet(a: &MarkedPoint, b: &MarkedPoint) -> Option<f64> {
    let d = a.dist(b);
    (d <= a.m() + b.m()).then_some(d)
}

fn largest_mark(config: &PointConfiguration) -> Result<f64> {
    if !config.has_marks() {
        return Err(Error::MissingMarks);
    }
    Ok(config.points.iter().map(|p| p.m()).fold(0.0, f64::max))
}

/// `phi(x - y) 1{|x - y| <= R_x + R_y}` with interaction radius `2 r_max`.
pub fn boolean_kernel(phi: Phi, r_max: f64) -> Kernel {
    Kernel::new(2, format!("boolean({phi:?})"), move |a| grains_meet(&a[0], &a[1]).map_or(0.0, |d| phi.eval(d)))
        .with_radius(2.0 * r_max)
        .stationary()
}

/// Sum over ordered pairs of distinct points of
/// `phi(x - y) 1{|x - y| <= R_x + R_y}`.
///
/// Pairs are summed in the same lexicographic order as the U-statistic
/// evaluator, so the two agree to the bit.
pub fn boolean_edge_mass(config: &PointConfiguration, phi: Phi) -> Result<f64> {
    phi.validate()?;
    largest_mark(config)?;
    let pts = &config.points;
    // a meeting pair lies within twice the larger radius of either member
    let fwd = forward_neighbors_by(pts, config.dim(), |i| 2.0 * pts[i].m(), |i, j| grains_meet(&pts[i], &pts[j]).is_some());
    let mut total = 0.0;
    for (i, list) in fwd.iter().enumerate() {
        for &j in list {
            total += 2.0 * phi.eval(pts[i].dist(&pts[j]));
        }
    }
    Ok(total)
}

/// `P(R + R' >= s)` in closed form for atomic laws and by one-dimensional
/// quadrature of the convolution for the power law.
pub fn chi_nu_exact(s: f64, nu: &MarkDistribution) -> Result<f64> {
    let s = s.abs();
    Ok(match nu {
        MarkDistribution::None => return Err(Error::MissingMarks),
        MarkDistribution::Constant { value } => f64::from(2.0 * value >= s),
        MarkDistribution::Empirical { values, probs } => {
            let mut p = 0.0;
            for (a, pa) in values.iter().zip(probs) {
                for (b, pb) in values.iter().zip(probs) {
                    if a + b >= s {
                        p += pa * pb;
                    }
                }
            }
            p
        }
        MarkDistribution::PowerLaw { alpha, cutoff } => {
            let c = *cutoff;
            if s <= 2.0 * c {
                return Ok(1.0);
            }
            // both marks below s/2 cannot reach s, so with u = s - R over [c, s/2]:
            // 2 [P(R >= s - c) + int f(s - u) P(R' >= u) du] - P(R >= s/2)^2
            let f = |u: f64| nu.density(s - u).unwrap_or(0.0) * (u / c).powf(1.0 - alpha);
            let half = 0.5 * s;
            let mut breaks = Vec::new();
            let mut u = 2.0 * c;
            while u < half {
                breaks.push(u);
                u *= 2.0;
            }
            let p = 2.0 * (nu.tail(s - c) + integrate_1d(f, c, half, &breaks, 1, 16)) - nu.tail(half).powi(2);
            p.clamp(0.0, 1.0)
        }
    })
}

/// Monte Carlo estimate of `P(R + R' >= |x|)` over two independent marks.
pub fn chi_nu_mc(x: &[f64], nu: &MarkDistribution, budget: u64, key: StreamKey) -> Result<MCEstimate> {
    if !nu.is_marked() {
        return Err(Error::MissingMarks);
    }
    nu.validate()?;
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(mc_mean(budget, key, |rng| {
        let a = nu.quantile(rng.random::<f64>());
        let b = nu.quantile(rng.random::<f64>());
        f64::from(a + b >= s)
    }))
}

/// `chi_nu(x)`: exact for atomic laws, Monte Carlo otherwise.
pub fn chi_nu(x: &[f64], nu: &MarkDistribution, budget: u64, key: StreamKey) -> Result<MCEstimate> {
    match nu {
        MarkDistribution::Constant { .. } | MarkDistribution::Empirical { .. } => {
            let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(MCEstimate::exact(chi_nu_exact(s, nu)?))
        }
        _ => chi_nu_mc(x, nu, budget, key),
    }
}

/// Whether the power-law tail moment needed for a finite limit variance of
/// the edge mass holds: `alpha > 2 (beta + d) + 1`.
pub fn variance_condition(phi: Phi, nu: &MarkDistribution, d: usize) -> bool {
    match (phi, nu) {
        (Phi::Power { beta }, MarkDistribution::PowerLaw { alpha, .. }) => *alpha > 2.0 * (beta + d as f64) + 1.0,
        _ => true,
    }
}

/// `int_{R^d} phi(x) chi_nu(x) dx`, the limit of `E G / lambda` for unit
/// intensity, by radial Gauss-Legendre quadrature.
pub fn boolean_mean(phi: Phi, nu: &MarkDistribution, d: usize, order: usize) -> Result<MCEstimate> {
    phi.validate()?;
    nu.validate()?;
    if d == 0 {
        return Err(invalid("d", "must be positive"));
    }
    if matches!(phi, Phi::Zero) {
        return Ok(MCEstimate::ZERO);
    }
    let df = d as f64;
    if let Phi::Power { beta } = phi {
        if beta <= -df {
            return Err(Error::Divergent(format!("|x|^{beta} is not integrable at the origin in d = {d}")));
        }
        if let MarkDistribution::PowerLaw { alpha, .. } = nu {
            if *alpha <= beta + df + 1.0 {
                return Err(Error::Divergent(format!("chi decays like s^(1-{alpha}), too slowly against |x|^{beta} in d = {d}")));
            }
        }
    }
    let mut breaks: Vec<f64> = Vec::new();
    let upper = match nu {
        MarkDistribution::None => return Err(Error::MissingMarks),
        MarkDistribution::Constant { value } => {
            breaks.push(2.0 * value);
            2.0 * value
        }
        MarkDistribution::Empirical { values, .. } => {
            for a in values {
                for b in values {
                    breaks.push(a + b);
                }
            }
            breaks.iter().copied().fold(0.0, f64::max)
        }
        MarkDistribution::PowerLaw { cutoff, .. } => {
            let mut x = 2.0 * cutoff;
            for _ in 0..=60 {
                breaks.push(x);
                x *= 2.0;
            }
            x
        }
    };
    let upper = match phi {
        Phi::Indicator { radius } => {
            breaks.push(radius);
            upper.min(radius)
        }
        _ => upper,
    };
    if upper <= 0.0 {
        return Ok(MCEstimate::ZERO);
    }
    // refine towards the origin for singular powers
    let mut x = breaks.iter().copied().filter(|b| *b > 0.0).fold(upper, f64::min);
    for _ in 0..40 {
        x *= 0.5;
        breaks.push(x);
    }
    let err = std::cell::Cell::new(None);
    let integrand = |s: f64| match chi_nu_exact(s, nu) {
        Ok(chi) => phi.eval(s) * chi * s.powi(d as i32 - 1),
        Err(e) => {
            err.set(Some(e));
            0.0
        }
    };
    let v = integrate_1d(integrand, 0.0, upper, &breaks, 1, order);
    if let Some(e) = err.take() {
        return Err(e);
    }
    Ok(MCEstimate::exact(sphere_area(d) * v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_process::{sample_poisson_pp, Window};
    use crate::ustat::UStatistic;

    fn pair(dist: f64, r: (f64, f64)) -> PointConfiguration {
        let pts = vec![MarkedPoint::at(0.0).with_mark(r.0), MarkedPoint::at(dist).with_mark(r.1)];
        PointConfiguration::from_points(Window::cube(1, 10.0).unwrap(), pts)
    }

    #[test]
    fn hand_examples() {
        let norm = Phi::Power { beta: 1.0 };
        assert_eq!(boolean_edge_mass(&pair(3.0, (1.0, 1.0)), norm).unwrap(), 0.0);
        assert_eq!(boolean_edge_mass(&pair(1.0, (1.0, 1.0)), norm).unwrap(), 2.0);
        let bare = PointConfiguration::from_points(Window::cube(1, 1.0).unwrap(), vec![MarkedPoint::at(0.0)]);
        assert!(matches!(boolean_edge_mass(&bare, norm), Err(Error::MissingMarks)));
    }

    #[test]
    fn edge_mass_matches_ustat() {
        let nu = MarkDistribution::power_law(9.5, 1.0).unwrap();
        for seed in 0..5 {
            let w = Window::cube(2, 6.0).unwrap();
            let cfg = sample_poisson_pp(&w, 1.5, &nu, StreamKey::new(seed, 0)).unwrap();
            let phi = Phi::Power { beta: 0.5 };
            let fast = boolean_edge_mass(&cfg, phi).unwrap();
            let r_max = cfg.points.iter().map(|p| p.m()).fold(0.0, f64::max);
            let u = UStatistic::grid(boolean_kernel(phi, r_max)).unwrap().evaluate(&cfg).unwrap();
            assert_eq!(fast, u);
            assert_eq!(fast, UStatistic::brute_force(boolean_kernel(phi, r_max)).evaluate(&cfg).unwrap());
        }
    }

    #[test]
    fn chi_examples() {
        let one = MarkDistribution::constant(1.0);
        assert_eq!(chi_nu(&[0.0], &one, 10, StreamKey::new(0, 0)).unwrap().value, 1.0);
        assert_eq!(chi_nu(&[2.5], &one, 10, StreamKey::new(0, 0)).unwrap().value, 0.0);
        assert_eq!(chi_nu(&[1.9], &one, 10, StreamKey::new(0, 0)).unwrap().value, 1.0);
        let pl = MarkDistribution::power_law(4.0, 1.0).unwrap();
        assert_eq!(chi_nu_exact(0.0, &pl).unwrap(), 1.0);
        let mc = chi_nu_mc(&[1.5], &pl, 100_000, StreamKey::new(3, 0)).unwrap();
        assert!(mc.within(chi_nu_exact(1.5, &pl).unwrap(), 4.0), "{mc}");
        // beyond 2c the two sides disagree unless the convolution is right
        for s in [2.5, 4.0, 9.0] {
            let mc = chi_nu_mc(&[s], &pl, 200_000, StreamKey::new(4, s as u64)).unwrap();
            assert!(mc.within(chi_nu_exact(s, &pl).unwrap(), 4.0), "s={s}: {mc} vs {}", chi_nu_exact(s, &pl).unwrap());
        }
    }

    #[test]
    fn mean_closed_forms() {
        let one = MarkDistribution::constant(1.0);
        assert_eq!(boolean_mean(Phi::Zero, &one, 1, 20).unwrap().value, 0.0);
        let m = boolean_mean(Phi::Indicator { radius: 10.0 }, &one, 1, 20).unwrap();
        assert!((m.value - 4.0).abs() < 1e-12, "{m}");
        // d = 2, |x| phi: 2 pi int_0^2 s^2 ds = 16 pi / 3
        let m = boolean_mean(Phi::Power { beta: 1.0 }, &one, 2, 20).unwrap();
        assert!((m.value - 16.0 * std::f64::consts::PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn mean_power_law_tail() {
        // d = 1, phi = 1: int chi = 2 E(R + R') = 4 E R
        let pl = MarkDistribution::power_law(6.0, 1.0).unwrap();
        let m = boolean_mean(Phi::Power { beta: 0.0 }, &pl, 1, 20).unwrap();
        let want = 4.0 * pl.mean();
        assert!((m.value - want).abs() < 1e-8 * want, "{m} vs {want}");
        assert!(matches!(boolean_mean(Phi::Power { beta: 4.0 }, &pl, 1, 20), Err(Error::Divergent(_))));
        assert!(matches!(boolean_mean(Phi::Power { beta: -1.0 }, &pl, 1, 20), Err(Error::Divergent(_))));
        assert!(!variance_condition(Phi::Power { beta: 1.0 }, &MarkDistribution::power_law(6.0, 1.0).unwrap(), 2));
    }
}

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::kernel_algebra::quadrature::integrate_1d;
use crate::point_process::{Coords, MAX_DIM};

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma(d as f64 / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KappaForm {
    /// `C / (1 + |t|^(d + eps))`.
    CauchyPower { d: usize, eps: f64 },
    /// Piecewise constant on radial shells `[edges[i], edges[i+1])`,
    /// continued beyond the last edge by `values.last() * (r / r_max)^(-tail)`.
    Radial { d: usize, edges: Vec<f64>, values: Vec<f64>, tail: f64 },
}

/// Radial probability density on `R^d` used as the weight in the
/// A-functionals and as an importance-sampling proposal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaDensity {
    pub form: KappaForm,
    /// Multiplier turning the profile into a probability density.
    norm: f64,
    /// Upper bound `M` of the density.
    pub bound: f64,
    /// Cumulative component masses for the radial table (shells, then tail).
    cumulative: Vec<f64>,
}

impl KappaDensity {
    pub fn cauchy_power(d: usize, eps: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(invalid("kappa.d", format!("must lie in 1..={MAX_DIM}")));
        }
        if !(eps.is_finite() && eps > 0.0) {
            return Err(invalid("kappa.eps", format!("must be positive, got {eps}")));
        }
        let a = 1.0 + eps / d as f64;
        let z = sphere_area(d) / d as f64 * (PI / a) / (PI / a).sin();
        Ok(Self { form: KappaForm::CauchyPower { d, eps }, norm: 1.0 / z, bound: 1.0 / z, cumulative: vec![] })
    }

    /// The one-dimensional Cauchy density `1 / (pi (1 + t^2))`.
    pub fn cauchy() -> Self {
        Self::cauchy_power(1, 1.0).expect("valid parameters")
    }

    pub fn radial_table(d: usize, edges: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(invalid("kappa.d", format!("must lie in 1..={MAX_DIM}")));
        }
        if edges.len() != values.len() + 1 || values.is_empty() || edges[0] != 0.0 {
            return Err(invalid("kappa.edges", "need edges[0] = 0 and one more edge than values"));
        }
        if edges.windows(2).any(|w| !(w[1] > w[0])) || !edges.last().unwrap().is_finite() {
            return Err(invalid("kappa.edges", "must be strictly increasing and finite"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("kappa.values", "must be finite and positive"));
        }
        if !(tail.is_finite() && tail > d as f64) {
            return Err(invalid("kappa.tail", format!("tail exponent must exceed d = {d}")));
        }
        let s = sphere_area(d);
        let df = d as f64;
        let mut masses: Vec<f64> = values.iter().zip(edges.windows(2)).map(|(v, e)| v * s / df * (e[1].powf(df) - e[0].powf(df))).collect();
        let r_max = *edges.last().unwrap();
        masses.push(values.last().unwrap() * s * r_max.powf(df) / (tail - df));
        let total: f64 = masses.iter().sum();
        let mut acc = 0.0;
        let cumulative = masses
            .iter()
            .map(|m| {
                acc += m / total;
                acc
            })
            .collect();
        let bound = values.iter().cloned().fold(0.0, f64::max) / total;
        Ok(Self { form: KappaForm::Radial { d, edges, values, tail }, norm: 1.0 / total, bound, cumulative })
    }

    pub fn dim(&self) -> usize {
        match self.form {
            KappaForm::CauchyPower { d, .. } | KappaForm::Radial { d, .. } => d,
        }
    }

    /// Density as a function of the radius `|t|`.
    pub fn radial(&self, r: f64) -> f64 {
        match &self.form {
            KappaForm::CauchyPower { d, eps } => self.norm / (1.0 + r.powf(*d as f64 + eps)),
            KappaForm::Radial { edges, values, tail, .. } => {
                let r_max = *edges.last().unwrap();
                if r >= r_max {
                    return self.norm * values.last().unwrap() * (r / r_max).powf(-tail);
                }
                let i = edges.partition_point(|e| *e <= r) - 1;
                self.norm * values[i]
            }
        }
    }

    pub fn density(&self, t: &[f64]) -> f64 {
        self.radial(t.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// Total mass by radial quadrature; should be 1.
    pub fn total_mass(&self) -> f64 {
        let d = self.dim();
        let s = sphere_area(d);
        let df = d as f64;
        let breaks: Vec<f64> = match &self.form {
            KappaForm::Radial { edges, .. } => edges.iter().map(|r| r / (1.0 + r)).collect(),
            _ => vec![0.5],
        };
        // r = u / (1 - u) maps [0, 1) onto [0, inf)
        let f = |u: f64| {
            let r = u / (1.0 - u);
            self.radial(r) * r.powf(df - 1.0) / ((1.0 - u) * (1.0 - u))
        };
        s * integrate_1d(f, 0.0, 1.0, &breaks, 64, 16)
    }

    fn sample_radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.form {
            KappaForm::CauchyPower { d, eps } => {
                // u = r^d has density proportional to 1 / (1 + u^a)
                let a = 1.0 + eps / *d as f64;
                let scale = 2f64.powf(a - 1.0);
                loop {
                    let v: f64 = rng.random();
                    let u = (1.0 - v).powf(-1.0 / (a - 1.0)) - 1.0;
                    let accept = (1.0 + u).powf(a) / ((1.0 + u.powf(a)) * scale);
                    if rng.random::<f64>() < accept {
                        return u.powf(1.0 / *d as f64);
                    }
                }
            }
            KappaForm::Radial { d, edges, tail, .. } => {
                let df = *d as f64;
                let v: f64 = rng.random();
                let i = self.cumulative.partition_point(|c| *c <= v).min(self.cumulative.len() - 1);
                let w: f64 = rng.random();
                if i + 1 == self.cumulative.len() {
                    let r_max = *edges.last().unwrap();
                    r_max * (1.0 - w).powf(-1.0 / (tail - df))
                } else {
                    let (lo, hi) = (edges[i].powf(df), edges[i + 1].powf(df));
                    (lo + w * (hi - lo)).powf(1.0 / df)
                }
            }
        }
    }

    /// Draws `t ~ kappa`; coordinates beyond `dim()` are 0.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Coords {
        let d = self.dim();
        let r = self.sample_radius(rng);
        let mut c = [0.0; MAX_DIM];
        if d == 1 {
            c[0] = if rng.random::<bool>() { r } else { -r };
            return c;
        }
        loop {
            let mut n2 = 0.0;
            for x in c.iter_mut().take(d) {
                *x = rng.sample(StandardNormal);
                n2 += *x * *x;
            }
            if n2 > 0.0 {
                let s = r / n2.sqrt();
                for x in c.iter_mut().take(d) {
                    *x *= s;
                }
                return c;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    #[test]
    fn cauchy_normalization() {
        let k = KappaDensity::cauchy();
        assert!((k.bound - 1.0 / PI).abs() < 1e-15);
        assert!((k.density(&[1.0]) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn masses_are_one() {
        for k in [
            KappaDensity::cauchy(),
            KappaDensity::cauchy_power(2, 1.0).unwrap(),
            KappaDensity::cauchy_power(3, 2.0).unwrap(),
            KappaDensity::radial_table(2, vec![0.0, 0.5, 2.0], vec![3.0, 1.0], 4.0).unwrap(),
        ] {
            let m = k.total_mass();
            assert!((m - 1.0).abs() < 0.01, "{:?} mass {m}", k.form);
            assert!(k.radial(0.0) <= k.bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sampled_radius_cdf() {
        // P(|T| <= 1) for the Cauchy law is 1/2
        let k = KappaDensity::cauchy();
        let mut rng = StreamKey::new(5, 0).rng();
        let n = 100_000;
        let hits = (0..n).filter(|_| k.sample(&mut rng)[0].abs() <= 1.0).count() as f64 / n as f64;
        assert!((hits - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn table_sampler_matches_shell_mass() {
        let k = KappaDensity::radial_table(1, vec![0.0, 1.0], vec![1.0], 3.0).unwrap();
        // mass inside: 2; tail: 2 * 1 / (3 - 1) = 1; P(inside) = 2/3
        let mut rng = StreamKey::new(6, 0).rng();
        let n = 60_000;
        let hits = (0..n).filter(|_| k.sample(&mut rng)[0].abs() < 1.0).count() as f64 / n as f64;
        assert!((hits - 2.0 / 3.0).abs() < 4.0 * (2.0 / 9.0 / n as f64).sqrt());
    }
}

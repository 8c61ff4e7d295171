use std::fmt;
use std::sync::Arc;

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::point_process::{Coords, MarkDistribution, MarkedPoint, PointConfiguration, Window};
use crate::rng::StreamKey;

const INVERSION_LIMIT: f64 = 50.0;

/// Exact Poisson variate: sequential inversion below mean 50, PTRS
/// transformed rejection (Hoermann 1993) above.
pub fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    if mean < INVERSION_LIMIT {
        let u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            // tail mass below double resolution; u sits in rounding noise
            if p < f64::EPSILON * 1e-3 && k as f64 > mean {
                break;
            }
        }
        return k;
    }
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln() <= -mean + k * loglam - ln_gamma(k + 1.0) {
            return k as u64;
        }
    }
}

/// Marked Poisson process with intensity `intensity` (per unit volume) on
/// `window`, marks i.i.d. from `marks`.
pub fn sample_poisson_pp(window: &Window, intensity: f64, marks: &MarkDistribution, seed: StreamKey) -> Result<PointConfiguration> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(invalid("intensity", format!("must be finite and >= 0, got {intensity}")));
    }
    marks.validate()?;
    let mut rng = seed.rng();
    let n = poisson_count(intensity * window.volume(), &mut rng);
    let points = (0..n)
        .map(|_| {
            let coords = window.sample_uniform(&mut rng);
            MarkedPoint { coords, mark: marks.sample(&mut rng) }
        })
        .collect();
    Ok(PointConfiguration::new(window.clone(), intensity, points, seed))
}

pub type DensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Location law for the poissonized binomial sampler.
#[derive(Clone)]
pub enum SpatialDensity {
    Uniform(Window),
    /// Density `f` on `window` (w.r.t. Lebesgue), sampled by rejection under
    /// the constant envelope `f <= envelope`.
    Bounded {
        window: Window,
        f: DensityFn,
        envelope: f64,
    },
}

impl fmt::Debug for SpatialDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform(w) => f.debug_tuple("Uniform").field(w).finish(),
            Self::Bounded { window, envelope, .. } => {
                f.debug_struct("Bounded").field("window", window).field("envelope", envelope).finish_non_exhaustive()
            }
        }
    }
}

const PROBES_PER_AXIS: usize = 17;

impl SpatialDensity {
    pub fn bounded(window: Window, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, envelope: f64) -> Self {
        Self::Bounded { window, f: Arc::new(f), envelope }
    }

    pub fn window(&self) -> &Window {
        match self {
            Self::Uniform(w) | Self::Bounded { window: w, .. } => w,
        }
    }

    /// Probes the envelope on a regular grid covering the window, corners
    /// included.
    pub fn check_envelope(&self) -> Result<()> {
        let Self::Bounded { window, f, envelope } = self else {
            return Ok(());
        };
        if !(envelope.is_finite() && *envelope > 0.0) {
            return Err(invalid("envelope", format!("must be finite and positive, got {envelope}")));
        }
        let d = window.dim();
        let total = PROBES_PER_AXIS.pow(d as u32);
        let mut x = vec![0.0; d];
        for idx in 0..total {
            let mut rest = idx;
            for (a, xa) in x.iter_mut().enumerate() {
                let j = rest % PROBES_PER_AXIS;
                rest /= PROBES_PER_AXIS;
                let w = window.half_width()[a];
                *xa = -w + 2.0 * w * j as f64 / (PROBES_PER_AXIS - 1) as f64;
            }
            let v = f(&x);
            if !(v <= *envelope) {
                return Err(Error::EnvelopeTooSmall { envelope: *envelope, value: v });
            }
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Coords> {
        match self {
            Self::Uniform(w) => Ok(w.sample_uniform(rng)),
            Self::Bounded { window, f, envelope } => loop {
                let c = window.sample_uniform(rng);
                let v = f(&c[..window.dim()]);
                if v > *envelope {
                    return Err(Error::EnvelopeTooSmall { envelope: *envelope, value: v });
                }
                if rng.random::<f64>() * envelope < v {
                    return Ok(c);
                }
            },
        }
    }
}

/// `eta_n = sum_{i <= N(n)} delta_{Y_i}` with `N(n) ~ Poisson(n)` and `Y_i`
/// i.i.d. from `density`: a Poisson process with control `n f(x) dx`.
pub fn sample_poissonized_binomial(
    n: f64,
    density: &SpatialDensity,
    marks: &MarkDistribution,
    seed: StreamKey,
) -> Result<PointConfiguration> {
    if !(n.is_finite() && n >= 0.0) {
        return Err(invalid("n", format!("must be finite and >= 0, got {n}")));
    }
    density.check_envelope()?;
    marks.validate()?;
    let mut rng = seed.rng();
    let count = poisson_count(n, &mut rng);
    let mut points = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let coords = density.sample(&mut rng)?;
        points.push(MarkedPoint { coords, mark: marks.sample(&mut rng) });
    }
    let window = density.window().clone();
    let intensity = n / window.volume();
    Ok(PointConfiguration::new(window, intensity, points, seed))
}

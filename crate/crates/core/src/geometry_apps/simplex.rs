//! Coverage simplices: `k`-subsets in which every radius dominates every
//! pairwise distance.

use crate::error::{invalid, Error, Result};
use crate::kernel_algebra::Kernel;
use crate::neighbors::{for_each_clique, forward_neighbors_by};
use crate::point_process::{MarkedPoint, PointConfiguration};
use crate::ustat::for_each_subset;

use super::pattern::{MAX_PATTERN_ORDER, MIN_PATTERN_ORDER};

#[inline]
fn covered(a: &MarkedPoint, b: &MarkedPoint) -> bool {
    a.dist(b) <= a.m().min(b.m())
}

fn check(config: &PointConfiguration, k: usize) -> Result<()> {
    if !(MIN_PATTERN_ORDER..=MAX_PATTERN_ORDER).contains(&k) {
        return Err(invalid("k", format!("must lie in {MIN_PATTERN_ORDER}..={MAX_PATTERN_ORDER}, got {k}")));
    }
    if !config.has_marks() {
        return Err(Error::MissingMarks);
    }
    Ok(())
}

/// Number of `k`-subsets with `|x_i - x_j| <= min(R_i, R_j)` for every pair.
pub fn simplex_count(config: &PointConfiguration, k: usize) -> Result<u64> {
    check(config, k)?;
    let pts = &config.points;
    let fwd = forward_neighbors_by(pts, config.dim(), |i| pts[i].m(), |i, j| covered(&pts[i], &pts[j]));
    let mut count = 0u64;
    for_each_clique(&fwd, k, |_| count += 1);
    Ok(count)
}

pub fn simplex_count_brute(config: &PointConfiguration, k: usize) -> Result<u64> {
    check(config, k)?;
    let pts = &config.points;
    let mut count = 0u64;
    for_each_subset(pts.len(), k, |s| {
        if s.iter().enumerate().all(|(a, &i)| s[a + 1..].iter().all(|&j| covered(&pts[i], &pts[j]))) {
            count += 1;
        }
    });
    Ok(count)
}

/// Order-`k` simplex indicator; `r_max` bounds the marks it will see.
pub fn simplex_kernel(k: usize, r_max: f64) -> Kernel {
    Kernel::new(k, format!("simplex{k}"), |a| {
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if !covered(&a[i], &a[j]) {
                    return 0.0;
                }
            }
        }
        1.0
    })
    .with_radius(r_max)
    .stationary()
    .with_bound(1.0)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;
    use crate::geometry_apps::{subgraph_count, PatternGraph};
    use crate::kernel_algebra::factorial;
    use crate::point_process::Window;
    use crate::ustat::UStatistic;

    #[test]
    fn hand_examples() {
        let w = Window::cube(1, 5.0).unwrap();
        let c = PointConfiguration::from_points(w.clone(), vec![MarkedPoint::at(0.0).with_mark(2.0), MarkedPoint::at(1.0).with_mark(0.5)]);
        assert_eq!(simplex_count(&c, 2).unwrap(), 0);
        assert_eq!(simplex_count(&c, 3).unwrap(), 0);
        assert!(simplex_count(&c, 7).is_err());
        let bare = PointConfiguration::from_points(w, vec![MarkedPoint::at(0.0)]);
        assert!(matches!(simplex_count(&bare, 2), Err(Error::MissingMarks)));
    }

    #[test]
    fn grid_matches_brute_and_cliques() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let r = rng.random_range(0.2..0.5);
            let pts: Vec<MarkedPoint> =
                (0..12).map(|_| MarkedPoint::new(&[rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)], Some(r))).collect();
            let cfg = PointConfiguration::from_points(Window::unit_volume(2).unwrap(), pts);
            for k in 2..=4 {
                let fast = simplex_count(&cfg, k).unwrap();
                assert_eq!(fast, simplex_count_brute(&cfg, k).unwrap());
                assert_eq!(fast, subgraph_count(&cfg, r, &PatternGraph::complete(k).unwrap()).unwrap());
                let u = UStatistic::grid(simplex_kernel(k, r)).unwrap().evaluate(&cfg).unwrap();
                assert_eq!(u / factorial(k), fast as f64);
            }
        }
    }
}

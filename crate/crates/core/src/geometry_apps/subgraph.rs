//! Induced subgraph counts in the disk graph with edges `0 < |x - y| < t`.

use crate::error::{invalid, Result};
use crate::kernel_algebra::{factorial, Kernel};
use crate::neighbors::{forward_neighbors, symmetric};
use crate::point_process::{MarkedPoint, PointConfiguration};
use crate::ustat::for_each_subset;

use super::pattern::{edge_bit, PatternGraph};

#[inline]
fn linked(a: &MarkedPoint, b: &MarkedPoint, t: f64) -> bool {
    let d = a.dist(b);
    d > 0.0 && d < t
}

fn check_threshold(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("must be positive and finite, got {t}")));
    }
    Ok(())
}

fn subset_mask(points: &[MarkedPoint], subset: &[usize], t: f64) -> u64 {
    let mut mask = 0u64;
    for a in 0..subset.len() {
        for b in a + 1..subset.len() {
            if linked(&points[subset[a]], &points[subset[b]], t) {
                mask |= edge_bit(a, b);
            }
        }
    }
    mask
}

/// Disk-graph adjacency (both directions, sorted).
fn disk_graph(points: &[MarkedPoint], dim: usize, t: f64) -> Vec<Vec<usize>> {
    let mut fwd = forward_neighbors(points, dim, t);
    for (i, list) in fwd.iter_mut().enumerate() {
        list.retain(|&j| linked(&points[i], &points[j], t));
    }
    symmetric(&fwd)
}

/// Number of `k`-subsets whose induced disk graph is isomorphic to `pattern`.
///
/// Connected vertex sets are enumerated directly on the disk graph, each
/// exactly once, so only sets within `(k - 1) t` of their smallest member
/// are ever touched.
pub fn subgraph_count(config: &PointConfiguration, t: f64, pattern: &PatternGraph) -> Result<u64> {
    check_threshold(t)?;
    let (points, dim) = (&config.points, config.dim());
    let k = pattern.order();
    if points.len() < k {
        return Ok(0);
    }
    if k == 2 {
        return Ok(edge_count(points, dim, t));
    }
    let adj = disk_graph(points, dim, t);
    let mut count = 0u64;
    let mut sorted = Vec::with_capacity(k);
    connected_sets(&adj, k, |set| {
        sorted.clear();
        sorted.extend_from_slice(set);
        sorted.sort_unstable();
        if pattern.matches(subset_mask(points, &sorted, t)) {
            count += 1;
        }
    });
    Ok(count)
}

/// Same count by testing every `k`-subset.
pub fn subgraph_count_brute(config: &PointConfiguration, t: f64, pattern: &PatternGraph) -> Result<u64> {
    check_threshold(t)?;
    let mut count = 0u64;
    for_each_subset(config.len(), pattern.order(), |s| {
        if pattern.matches(subset_mask(&config.points, s, t)) {
            count += 1;
        }
    });
    Ok(count)
}

/// Order-`k` indicator of an induced copy of `pattern`; its ordered
/// U-statistic is `k!` times [`subgraph_count`].
pub fn subgraph_kernel(pattern: &PatternGraph, t: f64) -> Result<Kernel> {
    check_threshold(t)?;
    let p = pattern.clone();
    let k = p.order();
    let idx: Vec<usize> = (0..k).collect();
    Ok(Kernel::new(k, format!("subgraph{:?}({t})", p.edges()), move |a| f64::from(p.matches(subset_mask(a, &idx, t))))
        .with_radius((k - 1) as f64 * t)
        .stationary()
        .with_bound(1.0))
}

/// Ordered U-statistic value of [`subgraph_kernel`] scaled to a subset count.
pub fn subset_count_from_ordered(value: f64, k: usize) -> f64 {
    value / factorial(k)
}

/// Number of edges of the disk graph.
pub fn edge_count(points: &[MarkedPoint], dim: usize, t: f64) -> u64 {
    if dim == 1 {
        let mut xs: Vec<f64> = points.iter().map(|p| p.coords[0]).collect();
        xs.sort_by(f64::total_cmp);
        return edge_count_sorted(&xs, t);
    }
    let fwd = forward_neighbors(points, dim, t);
    fwd.iter().enumerate().map(|(i, l)| l.iter().filter(|&&j| linked(&points[i], &points[j], t)).count() as u64).sum()
}

/// Pairs `i < j` of a sorted sequence with `0 < x_j - x_i < t`.
fn edge_count_sorted(xs: &[f64], t: f64) -> u64 {
    let n = xs.len();
    let (mut far, mut same) = (0usize, 0usize);
    let mut total = 0u64;
    for i in 0..n {
        far = far.max(i + 1);
        while far < n && xs[far] - xs[i] < t {
            far += 1;
        }
        same = same.max(i + 1);
        while same < n && xs[same] == xs[i] {
            same += 1;
        }
        total += (far - same.min(far)) as u64;
    }
    total
}

/// Visits every connected vertex set of size `k` once (ESU enumeration).
fn connected_sets(adj: &[Vec<usize>], k: usize, mut visit: impl FnMut(&[usize])) {
    let mut sub = Vec::with_capacity(k);
    for v in 0..adj.len() {
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        sub.push(v);
        extend_set(adj, k, v, &mut sub, ext, &mut visit);
        sub.pop();
    }
}

fn extend_set(adj: &[Vec<usize>], k: usize, root: usize, sub: &mut Vec<usize>, mut ext: Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if sub.len() == k {
        visit(sub);
        return;
    }
    while let Some(w) = ext.pop() {
        let mut next = ext.clone();
        for &u in &adj[w] {
            // exclusive neighbors of w: not in the set and not adjacent to it
            if u > root && !sub.contains(&u) && !sub.iter().any(|&s| adj[s].binary_search(&u).is_ok()) {
                next.push(u);
            }
        }
        sub.push(w);
        extend_set(adj, k, root, sub, next, visit);
        sub.pop();
    }
}

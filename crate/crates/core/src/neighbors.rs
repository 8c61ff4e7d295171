//! Fixed-radius neighbor search on a uniform cell grid.

use std::collections::HashMap;

use crate::point_process::{MarkedPoint, MAX_DIM};

type Cell = [i64; MAX_DIM];

/// Relative slack added to search radii so that kernels testing `<= r`
/// with rounding in their own distance computation are never missed.
pub const RADIUS_SLACK: f64 = 1e-12;

fn cell_of(p: &MarkedPoint, dim: usize, side: f64) -> Cell {
    let mut c = [0i64; MAX_DIM];
    for i in 0..dim {
        c[i] = (p.coords[i] / side).floor() as i64;
    }
    c
}

/// For every point, the sorted indices `j > i` with `|x_i - x_j| <= r`
/// (up to [`RADIUS_SLACK`]).
pub fn forward_neighbors(points: &[MarkedPoint], dim: usize, r: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut out = vec![Vec::new(); n];
    if n < 2 || !(r >= 0.0) {
        return out;
    }
    let reach = r * (1.0 + RADIUS_SLACK);
    let reach_sq = reach * reach;
    if !(r > 0.0 && r.is_finite()) || n < 32 {
        // tiny inputs and degenerate radii: direct scan
        for i in 0..n {
            for j in i + 1..n {
                if points[i].dist_sq(&points[j]) <= reach_sq {
                    out[i].push(j);
                }
            }
        }
        return out;
    }
    let mut grid: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell_of(p, dim, reach)).or_default().push(i);
    }
    let offsets = neighbor_offsets(dim);
    for (i, p) in points.iter().enumerate() {
        let c = cell_of(p, dim, reach);
        for off in &offsets {
            let mut nc = c;
            for a in 0..dim {
                nc[a] += off[a];
            }
            if let Some(list) = grid.get(&nc) {
                for &j in list {
                    if j > i && p.dist_sq(&points[j]) <= reach_sq {
                        out[i].push(j);
                    }
                }
            }
        }
        out[i].sort_unstable();
    }
    out
}

/// Forward adjacency with per-point search radii: `j` joins `i`'s list
/// (`i < j`) when either point finds the other within its own `reach` and
/// `keep(i, j)` holds. `keep` must be symmetric and imply that one of the two
/// reaches covers the distance.
pub fn forward_neighbors_by(
    points: &[MarkedPoint],
    dim: usize,
    reach: impl Fn(usize) -> f64,
    keep: impl Fn(usize, usize) -> bool,
) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut out = vec![Vec::new(); n];
    if n < 2 {
        return out;
    }
    let mut radii: Vec<f64> = (0..n).map(&reach).filter(|r| *r > 0.0 && r.is_finite()).collect();
    if radii.is_empty() || n < 32 {
        for i in 0..n {
            for j in i + 1..n {
                if keep(i, j) {
                    out[i].push(j);
                }
            }
        }
        return out;
    }
    radii.sort_by(f64::total_cmp);
    let side = radii[radii.len() / 2];
    let mut grid: HashMap<Cell, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell_of(p, dim, side)).or_default().push(i);
    }
    let mut push = |i: usize, j: usize| {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        out[a].push(b);
    };
    for (i, p) in points.iter().enumerate() {
        let r = reach(i);
        if !(r >= 0.0) {
            continue;
        }
        let r_sq = {
            let x = r * (1.0 + RADIUS_SLACK);
            x * x
        };
        let span = (r * (1.0 + RADIUS_SLACK) / side).ceil();
        let scan_cells = (2.0 * span + 1.0).powi(dim as i32);
        if !r.is_finite() || scan_cells > grid.len() as f64 {
            for j in 0..n {
                if j != i && p.dist_sq(&points[j]) <= r_sq && keep(i, j) {
                    push(i, j);
                }
            }
            continue;
        }
        let span = span as i64;
        let c = cell_of(p, dim, side);
        let mut off = [-span; MAX_DIM];
        for a in dim..MAX_DIM {
            off[a] = 0;
        }
        loop {
            let mut nc = c;
            for a in 0..dim {
                nc[a] += off[a];
            }
            if let Some(list) = grid.get(&nc) {
                for &j in list {
                    if j != i && p.dist_sq(&points[j]) <= r_sq && keep(i, j) {
                        push(i, j);
                    }
                }
            }
            let mut a = 0;
            while a < dim {
                off[a] += 1;
                if off[a] <= span {
                    break;
                }
                off[a] = -span;
                a += 1;
            }
            if a == dim {
                break;
            }
        }
    }
    for l in out.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    out
}

/// Symmetric adjacency lists (both directions, sorted) from forward lists.
pub fn symmetric(forward: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); forward.len()];
    for (i, f) in forward.iter().enumerate() {
        for &j in f {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    adj
}

fn neighbor_offsets(dim: usize) -> Vec<Cell> {
    let mut out = vec![[0i64; MAX_DIM]];
    for a in 0..dim {
        let mut next = Vec::with_capacity(out.len() * 3);
        for o in &out {
            for s in [-1, 0, 1] {
                let mut c = *o;
                c[a] = s;
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Calls `visit` on every increasing index tuple of length `k` whose members
/// are pairwise adjacent in `forward`, in lexicographic order.
pub fn for_each_clique(forward: &[Vec<usize>], k: usize, mut visit: impl FnMut(&[usize])) {
    if k == 0 {
        return;
    }
    let mut stack = Vec::with_capacity(k);
    for i in 0..forward.len() {
        stack.push(i);
        extend(forward, k, &forward[i], &mut stack, &mut visit);
        stack.pop();
    }
}

fn extend(forward: &[Vec<usize>], k: usize, cand: &[usize], stack: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if stack.len() == k {
        visit(stack);
        return;
    }
    for (pos, &j) in cand.iter().enumerate() {
        if k - stack.len() > cand.len() - pos {
            break;
        }
        let next = intersect_sorted(&cand[pos + 1..], &forward[j]);
        stack.push(j);
        extend(forward, k, &next, stack, visit);
        stack.pop();
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};

    use super::*;

    #[test]
    fn grid_matches_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for dim in 1..=3 {
            let pts: Vec<MarkedPoint> = (0..300)
                .map(|_| {
                    let c: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
                    MarkedPoint::new(&c, None)
                })
                .collect();
            let fast = forward_neighbors(&pts, dim, 0.4);
            for i in 0..pts.len() {
                let slow: Vec<usize> = (i + 1..pts.len()).filter(|&j| pts[i].dist(&pts[j]) <= 0.4).collect();
                assert_eq!(fast[i], slow);
            }
        }
    }

    #[test]
    fn cliques_in_lex_order() {
        // path 0-1-2 plus chord 0-2 and pendant 2-3
        let fwd = vec![vec![1, 2], vec![2], vec![3], vec![]];
        let mut seen = Vec::new();
        for_each_clique(&fwd, 2, |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![2, 3]]);
        let mut tri = Vec::new();
        for_each_clique(&fwd, 3, |c| tri.push(c.to_vec()));
        assert_eq!(tri, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn variable_radii_match_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<MarkedPoint> = (0..400)
            .map(|_| {
                MarkedPoint::new(&[rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)], Some(0.1 / rng.random_range(0.02..1.0f64)))
            })
            .collect();
        let keep = |i: usize, j: usize| pts[i].dist(&pts[j]) <= pts[i].m().min(pts[j].m());
        let fast = forward_neighbors_by(&pts, 2, |i| pts[i].m(), keep);
        for i in 0..pts.len() {
            let slow: Vec<usize> = (i + 1..pts.len()).filter(|&j| keep(i, j)).collect();
            assert_eq!(fast[i], slow);
        }
    }
}

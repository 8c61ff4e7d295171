use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const MIN_PATTERN_ORDER: usize = 2;
pub const MAX_PATTERN_ORDER: usize = 6;

/// Bit of the edge `{a, b}`, `a < b`, in an adjacency mask.
#[inline]
pub(crate) fn edge_bit(a: usize, b: usize) -> u64 {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    1u64 << (a * MAX_PATTERN_ORDER + b)
}

/// A connected simple graph on `k` vertices, `2 <= k <= 6`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternSpec", into = "PatternSpec")]
pub struct PatternGraph {
    k: usize,
    edges: Vec<(usize, usize)>,
    /// Masks of every relabeling, sorted.
    images: Vec<u64>,
    degrees: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PatternSpec {
    k: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<PatternSpec> for PatternGraph {
    type Error = crate::error::Error;
    fn try_from(s: PatternSpec) -> Result<Self> {
        Self::new(s.k, &s.edges)
    }
}

impl From<PatternGraph> for PatternSpec {
    fn from(p: PatternGraph) -> Self {
        Self { k: p.k, edges: p.edges }
    }
}

impl PatternGraph {
    /// Vertices are `0..k`.
    pub fn new(k: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if !(MIN_PATTERN_ORDER..=MAX_PATTERN_ORDER).contains(&k) {
            return Err(invalid("pattern.k", format!("must lie in {MIN_PATTERN_ORDER}..={MAX_PATTERN_ORDER}, got {k}")));
        }
        let mut mask = 0u64;
        let mut norm = Vec::new();
        for &(a, b) in edges {
            if a >= k || b >= k {
                return Err(invalid("pattern.edges", format!("vertex out of range in ({a}, {b})")));
            }
            if a == b {
                return Err(invalid("pattern.edges", format!("self-loop at {a}")));
            }
            let bit = edge_bit(a, b);
            if mask & bit == 0 {
                mask |= bit;
                norm.push((a.min(b), a.max(b)));
            }
        }
        norm.sort_unstable();
        if !connected(k, mask) {
            return Err(invalid("pattern.edges", "pattern must be connected"));
        }
        let mut images = Vec::new();
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            images.push(norm.iter().fold(0u64, |m, &(a, b)| m | edge_bit(perm[a], perm[b])));
            if !next_perm(&mut perm) {
                break;
            }
        }
        images.sort_unstable();
        images.dedup();
        Ok(Self { k, degrees: degree_sequence(k, mask), edges: norm, images })
    }

    pub fn complete(k: usize) -> Result<Self> {
        let e: Vec<(usize, usize)> = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect();
        Self::new(k, &e)
    }

    pub fn path(k: usize) -> Result<Self> {
        let e: Vec<(usize, usize)> = (1..k).map(|a| (a - 1, a)).collect();
        Self::new(k, &e)
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(invalid("pattern.k", "a cycle needs at least 3 vertices"));
        }
        let e: Vec<(usize, usize)> = (0..k).map(|a| (a, (a + 1) % k)).collect();
        Self::new(k, &e)
    }

    pub fn star(k: usize) -> Result<Self> {
        let e: Vec<(usize, usize)> = (1..k).map(|a| (0, a)).collect();
        Self::new(k, &e)
    }

    /// `complete:k`, `path:k`, `cycle:k` or `star:k`.
    pub fn parse(name: &str) -> Result<Self> {
        let (kind, k) = name.split_once(':').ok_or_else(|| invalid("pattern", format!("expected `family:k`, got `{name}`")))?;
        let k: usize = k.trim().parse().map_err(|_| invalid("pattern", format!("bad order in `{name}`")))?;
        match kind.trim() {
            "complete" => Self::complete(k),
            "path" => Self::path(k),
            "cycle" => Self::cycle(k),
            "star" => Self::star(k),
            other => Err(invalid("pattern", format!("unknown family `{other}`"))),
        }
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Whether the graph with adjacency `mask` on `0..k` is isomorphic to
    /// the pattern.
    pub fn matches(&self, mask: u64) -> bool {
        if mask.count_ones() as usize != self.edges.len() {
            return false;
        }
        if degree_sequence(self.k, mask) != self.degrees {
            return false;
        }
        self.images.binary_search(&mask).is_ok()
    }
}

fn degree_sequence(k: usize, mask: u64) -> Vec<usize> {
    let mut d: Vec<usize> = (0..k).map(|a| (0..k).filter(|&b| b != a && mask & edge_bit(a, b) != 0).count()).collect();
    d.sort_unstable();
    d
}

fn connected(k: usize, mask: u64) -> bool {
    let mut seen = 1u32;
    let mut stack = vec![0];
    while let Some(a) = stack.pop() {
        for b in 0..k {
            if b != a && seen & (1 << b) == 0 && mask & edge_bit(a, b) != 0 {
                seen |= 1 << b;
                stack.push(b);
            }
        }
    }
    seen.count_ones() as usize == k
}

fn next_perm(p: &mut [usize]) -> bool {
    let n = p.len();
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PatternGraph::new(3, &[(0, 1)]).is_err());
        assert!(PatternGraph::new(2, &[(0, 0), (0, 1)]).is_err());
        assert!(PatternGraph::new(7, &[]).is_err());
        assert!(PatternGraph::parse("path:3").is_ok());
        assert!(PatternGraph::parse("wheel:4").is_err());
    }

    #[test]
    fn path_images() {
        let p = PatternGraph::path(3).unwrap();
        // three labelings of P3
        assert_eq!(p.images.len(), 3);
        assert!(p.matches(edge_bit(0, 2) | edge_bit(1, 2)));
        assert!(!p.matches(edge_bit(0, 1) | edge_bit(1, 2) | edge_bit(0, 2)));
        let k4 = PatternGraph::complete(4).unwrap();
        assert_eq!(k4.images.len(), 1);
    }
}

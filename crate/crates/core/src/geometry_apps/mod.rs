//! Disk-graph subgraph counts, the Boolean model and coverage simplices.

mod boolean;
mod pattern;
mod regime;
mod simplex;
mod subgraph;

pub use boolean::{boolean_edge_mass, boolean_kernel, boolean_mean, chi_nu, chi_nu_exact, chi_nu_mc, variance_condition, Phi};
pub use pattern::{PatternGraph, MAX_PATTERN_ORDER, MIN_PATTERN_ORDER};
pub use regime::{regime_sequence, Regime, RegimeSpec};
pub use simplex::{simplex_count, simplex_count_brute, simplex_kernel};
pub use subgraph::{edge_count, subgraph_count, subgraph_count_brute, subgraph_kernel, subset_count_from_ordered};

//! Numerical companion for normal approximation of Poisson U-statistics:
//! point-process sampling, kernel and chaos algebra, U-statistic
//! evaluation, geometric applications and limit diagnostics.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::too_many_arguments, clippy::should_implement_trait)]

pub mod error;
pub mod experiment;
pub mod geometry_apps;
pub mod kernel_algebra;
pub mod limit_lab;
pub mod neighbors;
pub mod point_process;
pub mod rng;
pub mod ustat;

pub use error::{Error, Result};

//! Kernels, chaos projections, contractions and their norms.

mod a_functional;
mod b3;
mod chaos_kernel;
mod contraction;
mod estimate;
mod integrate;
mod kappa;
mod kernel;
mod lemmas;
mod norms;
mod omega;
mod quadrature;
mod rescaling;

pub use a_functional::{a_kappa_p, a_prime_p, hbar_norm_pow, kappa_integral, stationary_projection};
pub use b3::{b3_bound, quadruples, B3Parts, B3Report, QuadrupleRecord};
pub use chaos_kernel::{binomial, factorial, ChaosKernel, UNSTABLE_RELATIVE_SE};
pub use contraction::{contract, Contraction};
pub use estimate::{MCEstimate, Moments};
pub use integrate::{grid_sum, mc_mean, Control, Domain, GridSpec, Integrator, MAX_GRID_DIM, SHARD_SIZE};
pub use kappa::{sphere_area, KappaDensity, KappaForm};
pub use kernel::{catalog, Kernel, KernelFn, RandomizedKernel};
pub use lemmas::{
    contraction_window_bound, growth_ratio, projection_bound, GrowthPoint, ProjectionBoundCheck, WindowBoundCheck, CHECK_SIGMAS,
};
pub use norms::{contraction_norm_sq, integral, lp_norm_pow, norm_sq, power_integral};
pub use omega::{omega_diagnostics, OmegaReport, OmegaTerm};
pub use quadrature::{gauss_legendre, integrate_1d, QuadratureRule};
pub use rescaling::{verify_rescaling, verify_rescaling_lp, Rescaling};

//! Linearizing series of indifferent germs, radius-of-convergence
//! estimation and a brute-force composition oracle.

mod compose;
mod germ;
mod linearize;
mod radius;
mod scalar;

pub use compose::{compose_oracle, conjugate_germ, mul_trunc, revert, series_inverse, SeriesScalar};
pub use germ::{multiplier, to_c64, to_mp, GermForm, GermSeries};
pub use linearize::{linearize, LinearizationResult};
pub use radius::{hadamard_radius, RadiusEstimate, RadiusMethod, DEFAULT_WINDOW, GROWTH_FACTOR_INFINITE, MIN_COEFFICIENTS};
pub use scalar::ExtComplex;

/// Default truncation for polynomial germs.
pub const DEFAULT_N_POLYNOMIAL: usize = 4096;
/// Default truncation for germs given as truncated series.
pub const DEFAULT_N_SERIES: usize = 1024;

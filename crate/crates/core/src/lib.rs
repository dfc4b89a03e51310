//! Numerical laboratory for Brjuno-type arithmetic functions, linearization
//! series of indifferent germs and conformal radii of Siegel disks.
//!
//! The crate is organised bottom-up:
//!
//! - [`cfrac`]: exact angles, Gauss-map orbits, convergents.
//! - [`brjuno`]: the Yoccoz–Brjuno function `Y`, the Brjuno sum `B`, and the
//!   multiplication gap `Y(θ) − Y(mθ)`.
//! - [`powerseries`]: linearizing series, radius estimation, composition.
//! - [`families`]: germ constructors for the families studied here.
//! - [`capacity`]: conformal radius via logarithmic capacity of the inverted
//!   Siegel boundary.
//! - [`experiments`]: scans and identity checks producing [`experiments::ScanReport`]s.

pub mod brjuno;
pub mod capacity;
pub mod cfrac;
mod error;
pub mod experiments;
pub mod families;
pub mod powerseries;

pub use error::{Error, Result};

/// Default working precision in mantissa bits.
pub const DEFAULT_BITS: u32 = 256;

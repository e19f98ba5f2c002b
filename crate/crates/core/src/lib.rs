//! Exact computational ergodic theory on mixing subshifts of finite type.
//!
//! The crate builds points whose empirical measures accumulate on every
//! invariant measure (up to a chosen cylinder depth), verifies the
//! shadowing and averaging estimates that make the gluing work, scans
//! cylinders for such points, and certifies uniform hyperbolicity of
//! locally constant diagonal cocycles through mean-cycle computations.
//!
//! All arithmetic is exact: positions and counts are big integers, weights
//! and distances are big rationals.

pub mod error;
pub mod genericity;
pub mod glue;
pub mod hyperbolicity;
pub mod measures;
pub mod point;
pub mod rational;
pub mod sft;

pub use error::{Error, Result};
pub use point::{shift_distance, LocallyConstant, ScheduledPoint, Segment};
pub use sft::{PeriodicOrbit, PeriodicPoint, Sft, Symbol, Word};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

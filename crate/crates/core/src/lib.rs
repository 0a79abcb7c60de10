//! Spectral simulator for the semilinear heat equation `∂ₜy − Δy + f(y) = 0`
//! on a periodic box truncating ℝⁿ, together with a harness that evaluates
//! frequency functions, observation and interpolation inequalities, and
//! stability bounds on computed solutions.

pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod estimates;
pub mod frequency;
pub mod grid;
pub mod obsregion;
pub mod report;
pub mod semigroup;
pub mod stats;

pub use error::{Error, Result};
pub use grid::{Exponent, Field, GridSpec, Point};
pub use report::{CheckKind, EstimateReport, Fitted};

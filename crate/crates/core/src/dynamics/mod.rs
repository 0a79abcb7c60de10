//! Reaction terms, time stepping for the semilinear and linear-potential heat
//! equations, a Picard solver for the mild formulation, and the smoothing
//! checks.

mod nonlinearity;
mod picard;
mod potential;
mod smoothing;
mod solver;
mod trajectory;

pub use nonlinearity::{NonlinearityKind, NonlinearitySpec};
pub use picard::{picard_solve, MAX_SWEEPS, STALL_SWEEPS};
pub use potential::{solve_linear_potential, Potential};
pub use smoothing::{potential_smoothing_check, smoothing_check, sup_decay_slope, SMOOTHING_SLOPE_FLOOR};
pub use solver::{solve_semilinear, solve_semilinear_with, SolverOptions, DEFAULT_BLOWUP_THRESHOLD};
pub use trajectory::{sup_norm_bound, Trajectory, MANIFEST_FILE};

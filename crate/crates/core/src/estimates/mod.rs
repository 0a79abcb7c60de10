//! End-to-end inequality checks on solution pairs: local and global
//! interpolation, observation and conditional stability estimates, χ-function
//! bounds, unique-continuation probes, the superlinear Gronwall lemma, and
//! empirical constant fitting.

mod chi;
mod gronwall;
mod interpolation;
mod pair;
mod probe;
mod table;

pub use chi::{
    backward_bound_check, chi_bound_check, chi_of, chi_trace, observation_estimate_check, required_constant, ChiTrace,
    CHI_SLACK,
};
pub use gronwall::{gronwall_bound, gronwall_superlinear_check, integrate_scalar, log_spaced, GRONWALL_SLACK};
pub use interpolation::{
    conditional_stability_check, conditional_stability_triple, fit_beta_c, fit_with_holdout,
    global_interpolation_check, interpolation_report, local_energy_check, local_energy_ej,
    local_interpolation_check, FitOutcome, StabilityTriple, Triple, BETA_GRID, HOLDOUT_INFLATION,
};
pub use pair::SolutionPair;
pub use probe::{probe_site, unique_continuation_probe, ProbeRow, ProbeTable};
pub use table::Table;

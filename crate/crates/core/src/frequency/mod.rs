//! Cutoffs, Gaussian weights, the local frequency function and its
//! differential inequalities, the three-point log-convexity test, and the
//! diagnostic parameter formulas that go with them.

mod checks;
mod convexity;
mod cutoff;
mod function;

pub use checks::{frequency_derivative_check, variational_identity_check, FREQUENCY_SLACK};
pub use convexity::{
    convexity_bookkeeping, epsilon_h, log_convexity_check, logcon_constants, theta_estimate, Bookkeeping,
    ProofConstants, SampledFunction, CONVEXITY_REL_TOL,
};
pub use cutoff::{CutoffFamily, CutoffKind};
pub use function::{frequency, frequency_components, frequency_trace, gaussian_weight, FrequencyTrace};

/// Quintic `6s⁵ - 15s⁴ + 10s³` on `[0, 1]`, clamped outside: rises from 0 to
/// 1 with vanishing first and second derivatives at both ends.
pub fn smootherstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (s * (6.0 * s - 15.0) + 10.0)
}

pub(crate) fn smootherstep_d1(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        return 0.0;
    }
    30.0 * s * s * (s - 1.0) * (s - 1.0)
}

pub(crate) fn smootherstep_d2(s: f64) -> f64 {
    if !(0.0..=1.0).contains(&s) {
        return 0.0;
    }
    60.0 * s * (s - 1.0) * (2.0 * s - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smootherstep_endpoints() {
        assert_eq!(smootherstep(-1.0), 0.0);
        assert_eq!(smootherstep(0.0), 0.0);
        assert_eq!(smootherstep(1.0), 1.0);
        assert_eq!(smootherstep(2.0), 1.0);
        assert_eq!(smootherstep(0.5), 0.5);
        for s in [0.0, 1.0] {
            assert_eq!(smootherstep_d1(s), 0.0);
            assert_eq!(smootherstep_d2(s), 0.0);
        }
    }

    #[test]
    fn derivatives_match_differences() {
        let h = 1e-5;
        for s in [0.1, 0.3, 0.5, 0.77, 0.9] {
            let d1 = (smootherstep(s + h) - smootherstep(s - h)) / (2.0 * h);
            let d2 = (smootherstep_d1(s + h) - smootherstep_d1(s - h)) / (2.0 * h);
            assert!((d1 - smootherstep_d1(s)).abs() < 1e-8);
            assert!((d2 - smootherstep_d2(s)).abs() < 1e-6);
        }
    }
}

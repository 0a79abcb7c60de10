use serde::{Deserialize, Serialize};

use super::function::FrequencyTrace;
use crate::error::{invalid, Error, Result};
use crate::report::{CheckKind, EstimateReport};
use crate::stats::centered_derivative;

/// Relative slack on the three-point inequality.
pub const CONVEXITY_REL_TOL: f64 = 1e-10;

/// Positive function known at increasing sample times, linearly
/// interpolated in between.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(invalid("sampled function needs matching nonempty samples"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::BadOrdering("sample times must increase".into()));
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        let (lo, hi) = (self.times[0], *self.times.last().unwrap());
        if t < lo || t > hi {
            return Err(Error::BadOrdering(format!("t = {t} outside samples [{lo}, {hi}]")));
        }
        let k = self.times.partition_point(|&s| s < t);
        if k < self.times.len() && self.times[k] == t {
            return Ok(self.values[k]);
        }
        let w = (t - self.times[k - 1]) / (self.times[k] - self.times[k - 1]);
        Ok((1.0 - w) * self.values[k - 1] + w * self.values[k])
    }
}

/// Checks `g(t₂)^{1+D} ≤ g(t₃)·g(t₁)^D·e^𝒦` with `D` and `𝒦` in closed form.
#[allow(clippy::too_many_arguments)]
pub fn log_convexity_check(
    g: &SampledFunction,
    t1: f64,
    t2: f64,
    t3: f64,
    h: f64,
    t_final: f64,
    c_tilde: f64,
    c_bar: f64,
) -> Result<EstimateReport> {
    if !(t1 < t2 && t2 < t3 && t3 <= t_final) {
        return Err(Error::BadOrdering(format!("need t1 < t2 < t3 <= T, got {t1}, {t2}, {t3}, T = {t_final}")));
    }
    if !(h > 0.0) {
        return Err(invalid(format!("h = {h} must be positive")));
    }
    let (g1, g2, g3) = (g.at(t1)?, g.at(t2)?, g.at(t3)?);
    if !(g1 > 0.0 && g2 > 0.0 && g3 > 0.0) {
        return Err(Error::NonPositiveG);
    }
    let a1 = t_final - t1 + h;
    let a2 = t_final - t2 + h;
    let a3 = t_final - t3 + h;
    let d = (a2 / a3).ln() / (a1 / a2).ln();
    let inner = a2 * (a2 / a3).ln();
    let k = 2.0 * d * (t2 - t1) * (c_tilde + c_bar * (t2 - t1)) + 2.0 * (t3 - t2) * (c_tilde + c_bar * inner);
    let log_lhs = (1.0 + d) * g2.ln();
    let log_rhs = g3.ln() + d * g1.ln() + k;
    let pass = log_lhs <= log_rhs + CONVEXITY_REL_TOL.ln_1p();
    Ok(EstimateReport::new(CheckKind::Lemma2_5, log_lhs.exp(), pass)
        .factor("rhs", log_rhs.exp())
        .factor("D", d)
        .factor("K", k)
        .factor("log_margin", log_rhs - log_lhs)
        .meta_f64("t1", t1)
        .meta_f64("t2", t2)
        .meta_f64("t3", t3)
        .meta_f64("h", h)
        .meta_f64("T", t_final)
        .meta_f64("C_tilde", c_tilde)
        .meta_f64("C_bar", c_bar))
}

/// Smallest constants `(C̃, C̄)` for which the sampled weighted mass `g` and
/// frequency `N` of a trace satisfy `|½g' + Ng| ≤ C̃g` and
/// `N' ≤ N/(T-t+h) + C̄` at interior samples, each inflated by 5%.
pub fn logcon_constants(trace: &FrequencyTrace) -> Result<(f64, f64)> {
    if trace.len() < 3 {
        return Err(Error::InsufficientSamples { need: 3, got: trace.len() });
    }
    let mut c_tilde = 0.0f64;
    let mut c_bar = 0.0f64;
    for k in 1..trace.len() - 1 {
        let g = trace.den[k];
        let dg = centered_derivative(&trace.times, &trace.den, k);
        let dn = centered_derivative(&trace.times, &trace.n, k);
        c_tilde = c_tilde.max((0.5 * dg + trace.n[k] * g).abs() / g);
        c_bar = c_bar.max(dn - trace.n[k] / (trace.t_final - trace.times[k] + trace.h));
    }
    Ok((1.05 * c_tilde, 1.05 * c_bar.max(0.0)))
}

/// User-supplied constants for the diagnostic parameter formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProofConstants {
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub l5: f64,
    pub l6: f64,
    pub c_hat: Option<f64>,
}

impl Default for ProofConstants {
    fn default() -> Self {
        Self { l2: 1.0, l3: 1.0, l4: 1.0, l5: 1.0, l6: 1.0, c_hat: None }
    }
}

impl ProofConstants {
    /// Defaults with `L6 = 9R²/16`.
    pub fn for_scale(big_r: f64) -> Self {
        Self { l6: 9.0 * big_r * big_r / 16.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.l2, self.l3, self.l4, self.l5, self.l6];
        if all.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(invalid("proof constants must be positive"));
        }
        if let Some(c) = self.c_hat {
            if !(c >= 0.0) {
                return Err(invalid(format!("C_hat = {c} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// `k = min{L6/(2L2), 1/2}`.
    pub fn k(&self) -> f64 {
        (self.l6 / (2.0 * self.l2)).min(0.5)
    }
}

/// `θ_j` from `1/θ_j = L3·ln(e^{L4·L_M·T + L5(1+1/T)}·E_j/mass)`, clamped to
/// `min{1, T/2}`.
pub fn theta_estimate(e_j: f64, terminal_ball_mass: f64, t_final: f64, l_m: f64, pc: &ProofConstants) -> Result<f64> {
    pc.validate()?;
    if !(terminal_ball_mass > 0.0) {
        return Err(Error::ZeroTerminalMass);
    }
    if !(e_j > 0.0) || !(t_final > 0.0) {
        return Err(invalid("E_j and T must be positive"));
    }
    let cap = (t_final / 2.0).min(1.0);
    let log = pc.l4 * l_m * t_final + pc.l5 * (1.0 + 1.0 / t_final) + (e_j / terminal_ball_mass).ln();
    let inv = pc.l3 * log;
    if !(inv > 0.0) {
        return Ok(cap);
    }
    Ok((1.0 / inv).min(cap))
}

/// `(ε_j, h) = (kθ_j, μ·ε_j)` for a chosen `μ ∈ (0, 1)`.
pub fn epsilon_h(theta: f64, k: f64, mu: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid(format!("mu = {mu} must lie in (0, 1)")));
    }
    if !(theta > 0.0 && k > 0.0) {
        return Err(invalid("theta and k must be positive"));
    }
    let eps = k * theta;
    Ok((eps, mu * eps))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bookkeeping {
    pub d_l: f64,
    pub k_l: f64,
}

/// `D_l = ln(l+1)/ln((2l+1)/(l+1))` and
/// `𝒦_l = 2D_l[(Ĉ+1)lh + 4Ĉ(lh)²] + 2(Ĉ+1)lh + 8Ĉl(l+1)h²ln(l+1)`.
pub fn convexity_bookkeeping(l: f64, h: f64, c_hat: f64) -> Result<Bookkeeping> {
    if !(l >= 1.0) || !l.is_finite() {
        return Err(invalid(format!("l = {l} must be at least 1")));
    }
    if !(h > 0.0) || !(c_hat >= 0.0) {
        return Err(invalid("h must be positive and C_hat nonnegative"));
    }
    let d_l = (l + 1.0).ln() / ((2.0 * l + 1.0) / (l + 1.0)).ln();
    let lh = l * h;
    let k_l = 2.0 * d_l * ((c_hat + 1.0) * lh + 4.0 * c_hat * lh * lh)
        + 2.0 * (c_hat + 1.0) * lh
        + 8.0 * c_hat * l * (l + 1.0) * h * h * (l + 1.0).ln();
    Ok(Bookkeeping { d_l, k_l })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(c: f64) -> SampledFunction {
        SampledFunction::new(vec![0.0, 0.5, 1.0], vec![c; 3]).unwrap()
    }

    #[test]
    fn constant_equality_case() {
        let rep = log_convexity_check(&constant(2.0), 0.1, 0.4, 0.9, 0.1, 1.0, 0.0, 0.0).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.rhs_factors["K"], 0.0);
        assert!((rep.lhs - rep.rhs_factors["rhs"]).abs() < 1e-12 * rep.lhs);
    }

    #[test]
    fn inflated_middle_detected() {
        let g = SampledFunction::new(vec![0.0, 0.4, 1.0], vec![1.0, 10.0, 1.0]).unwrap();
        let rep = log_convexity_check(&g, 0.0, 0.4, 1.0, 0.1, 1.0, 0.0, 0.0).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn ordering_and_sign_errors() {
        let g = constant(1.0);
        assert!(matches!(log_convexity_check(&g, 0.5, 0.4, 0.9, 0.1, 1.0, 0.0, 0.0), Err(Error::BadOrdering(_))));
        let z = SampledFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(log_convexity_check(&z, 0.0, 0.5, 1.0, 0.1, 1.0, 0.0, 0.0), Err(Error::NonPositiveG)));
    }

    #[test]
    fn interpolation() {
        let g = SampledFunction::new(vec![0.0, 1.0, 3.0], vec![1.0, 3.0, 7.0]).unwrap();
        assert_eq!(g.at(0.5).unwrap(), 2.0);
        assert_eq!(g.at(2.0).unwrap(), 5.0);
        assert_eq!(g.at(3.0).unwrap(), 7.0);
        assert!(g.at(3.5).is_err());
    }

    #[test]
    fn theta_cases() {
        let pc = ProofConstants { l5: 1.0 / 0.3 / 2.0, ..ProofConstants::default() };
        let th = theta_estimate(1.0, 1.0, 1.0, 0.0, &pc).unwrap();
        assert!((th - 0.3).abs() < 1e-12);
        let pc = ProofConstants { l5: 0.25, ..ProofConstants::default() };
        assert_eq!(theta_estimate(1.0, 1.0, 1.0, 0.0, &pc).unwrap(), 0.5);
        let small = theta_estimate(1.0, 1e-300, 1.0, 0.0, &ProofConstants::default()).unwrap();
        assert!(small > 0.0 && small < 2e-3);
        assert!(matches!(theta_estimate(1.0, 0.0, 1.0, 0.0, &ProofConstants::default()), Err(Error::ZeroTerminalMass)));
    }

    #[test]
    fn k_and_epsilon() {
        let pc = ProofConstants::for_scale(1.0);
        assert_eq!(pc.l6, 0.5625);
        assert_eq!(pc.k(), 0.28125);
        assert_eq!(ProofConstants::default().k(), 0.5);
        let (e, h) = epsilon_h(0.4, 0.5, 0.5).unwrap();
        assert_eq!((e, h), (0.2, 0.1));
        assert!(epsilon_h(0.4, 0.5, 1.0).is_err());
    }

    #[test]
    fn bookkeeping_closed_forms() {
        let b = convexity_bookkeeping(1.0, 0.1, 0.0).unwrap();
        assert!((b.d_l - 2f64.ln() / 1.5f64.ln()).abs() < 1e-15);
        assert!((b.d_l - 1.709511).abs() < 1e-6);
        assert!((b.k_l - (2.0 * b.d_l * 0.1 + 0.2)).abs() < 1e-15);
        assert!(convexity_bookkeeping(3.0, 1e-12, 5.0).unwrap().k_l < 1e-9);
        assert!(convexity_bookkeeping(0.5, 0.1, 0.0).is_err());
    }
}

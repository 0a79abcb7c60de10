use crate::dynamics::potential::Potential;
use crate::dynamics::trajectory::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::grid::Exponent;
use crate::report::{CheckKind, EstimateReport};
use crate::stats::loglog_slope;

/// Smallest admissible log-log slope of a weighted sup-norm trace over its
/// earliest decade; anything steeper counts as growth as `t → 0`.
pub const SMOOTHING_SLOPE_FLOOR: f64 = -0.05;

/// Positive snapshot times with their sup norms.
fn positive_samples(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    traj.times()
        .iter()
        .zip(traj.fields())
        .filter(|(t, _)| **t > 0.0)
        .map(|(t, f)| (*t, f.max_abs()))
        .unzip()
}

/// Log-log slope of `‖y(t)‖_∞` against `t` over snapshots in `[lo, hi]`.
pub fn sup_decay_slope(traj: &Trajectory, lo: f64, hi: f64) -> Result<f64> {
    let (t, s) = positive_samples(traj);
    let (wt, ws): (Vec<f64>, Vec<f64>) =
        t.iter().zip(&s).filter(|(t, _)| **t >= lo && **t <= hi).map(|(a, b)| (*a, *b)).unzip();
    if wt.len() < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: wt.len() });
    }
    loglog_slope(&wt, &ws).ok_or(Error::InsufficientSamples { need: 2, got: wt.len() })
}

/// Trace of `weight(t)·‖y(t)‖_∞` with its supremum and early-decade slopes.
fn bounded_trace(
    kind: CheckKind,
    traj: &Trajectory,
    weight: impl Fn(f64) -> f64,
) -> Result<EstimateReport> {
    let (t, sup) = positive_samples(traj);
    if t.is_empty() {
        return Err(Error::InsufficientSamples { need: 2, got: 0 });
    }
    let trace: Vec<f64> = t.iter().zip(&sup).map(|(t, s)| weight(*t) * s).collect();
    let c = trace.iter().cloned().fold(0.0, f64::max);
    let hi = 10.0 * t[0];
    let idx: Vec<usize> = (0..t.len()).filter(|&k| t[k] <= hi * (1.0 + 1e-12)).collect();
    if idx.len() < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: idx.len() });
    }
    let wt: Vec<f64> = idx.iter().map(|&k| t[k]).collect();
    let wtrace: Vec<f64> = idx.iter().map(|&k| trace[k]).collect();
    let wsup: Vec<f64> = idx.iter().map(|&k| sup[k]).collect();
    let trace_slope = loglog_slope(&wt, &wtrace).unwrap_or(0.0);
    let decay_slope = loglog_slope(&wt, &wsup).unwrap_or(0.0);
    let pass = c.is_finite() && trace_slope >= SMOOTHING_SLOPE_FLOOR;
    Ok(EstimateReport::new(kind, c, pass)
        .factor("trace_slope", trace_slope)
        .factor("decay_slope", decay_slope)
        .meta_f64("window_lo", wt[0])
        .meta_f64("window_hi", *wt.last().unwrap())
        .meta_f64("T", traj.final_time())
        .meta("fspec", traj.fspec().kind.name())
        .meta_f64("lambda", traj.fspec().lambda)
        .meta_f64("p", traj.fspec().p)
        .meta("samples", t.len() as u64))
}

/// Trace `t ↦ t^{n/(2q)}‖y(t)‖_∞/‖y₀‖_q`; `lhs` is its supremum, the
/// empirical smoothing constant.
pub fn smoothing_check(traj: &Trajectory, q: f64) -> Result<EstimateReport> {
    if !(q >= 1.0) {
        return Err(invalid(format!("q = {q} must be >= 1")));
    }
    let norm = traj.initial().lp_norm(Exponent::from_f64(q))?;
    if norm == 0.0 {
        return Err(Error::ZeroInitialData);
    }
    let expo = traj.spec().dim() as f64 / (2.0 * q);
    Ok(bounded_trace(CheckKind::Eq3_5, traj, |t| t.powf(expo) / norm)?
        .factor("norm_q", norm)
        .meta_f64("q", q))
}

/// Trace `t ↦ ‖u(t)‖_∞ t^{n/(2γ)}/(e^{𝓛^ϑ t}‖u₀‖_γ)` with
/// `𝓛 = sup_t ‖a(t)‖_σ` and `ϑ = 2σ/(2σ - n)`.
pub fn potential_smoothing_check(
    traj: &Trajectory,
    potential: &Potential,
    sigma: f64,
    gamma: f64,
) -> Result<EstimateReport> {
    let n = traj.spec().dim() as f64;
    if !(sigma >= 1.0 && sigma > n / 2.0) {
        return Err(invalid(format!("sigma = {sigma} must satisfy sigma >= 1 and sigma > n/2")));
    }
    if !(gamma >= 1.0) {
        return Err(invalid(format!("gamma = {gamma} must be >= 1")));
    }
    let size = potential.sup_norm(Exponent::from_f64(sigma))?;
    let vartheta = if sigma.is_infinite() { 1.0 } else { 2.0 * sigma / (2.0 * sigma - n) };
    let norm = traj.initial().lp_norm(Exponent::from_f64(gamma))?;
    if norm == 0.0 {
        return Err(Error::ZeroInitialData);
    }
    let rate = size.powf(vartheta);
    let expo = n / (2.0 * gamma);
    Ok(bounded_trace(CheckKind::Eq2_3a, traj, |t| t.powf(expo) / ((rate * t).exp() * norm))?
        .factor("potential_norm", size)
        .factor("vartheta", vartheta)
        .factor("norm_gamma", norm)
        .meta_f64("sigma", sigma)
        .meta_f64("gamma", gamma))
}

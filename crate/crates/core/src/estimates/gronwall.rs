use crate::error::{invalid, Error, Result};
use crate::report::{CheckKind, EstimateReport};

/// Relative slack on the superlinear Gronwall bound.
pub const GRONWALL_SLACK: f64 = 1e-6;
const MAX_STEPS: usize = 2_000_000;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of a scalar ODE, reporting the
/// solution at the requested increasing `times` (all `≥ 0`).
pub fn integrate_scalar(rhs: impl Fn(f64, f64) -> f64, y0: f64, times: &[f64], rtol: f64, atol: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut y = y0;
    let mut h = times.last().copied().unwrap_or(1.0).max(1e-12) * 1e-6;
    let mut steps = 0usize;
    for &target in times {
        if target < t {
            return Err(invalid("output times must increase from 0"));
        }
        while t < target {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::IntegrationFailure(format!("step budget exhausted at t = {t}")));
            }
            let hh = h.min(target - t);
            let mut k = [0.0; 7];
            for s in 0..7 {
                let yi = y + hh * (0..s).map(|q| A[s][q] * k[q]).sum::<f64>();
                k[s] = rhs(t + C[s] * hh, yi);
            }
            let y5 = y + hh * (0..7).map(|s| B5[s] * k[s]).sum::<f64>();
            let y4 = y + hh * (0..7).map(|s| B4[s] * k[s]).sum::<f64>();
            let err = (y5 - y4).abs() / (atol + rtol * y.abs().max(y5.abs()));
            if !err.is_finite() {
                h = hh * 0.1;
                if h < 1e-300 {
                    return Err(Error::IntegrationFailure(format!("non-finite state at t = {t}")));
                }
                continue;
            }
            if err <= 1.0 {
                t += hh;
                y = y5;
                if (target - t).abs() <= 1e-15 * target.abs().max(1.0) {
                    t = target;
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = hh * factor;
            if h < 1e-300 {
                return Err(Error::IntegrationFailure(format!("step size underflow at t = {t}")));
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// `samples` log-spaced times over `[T·10⁻³, T]`.
pub fn log_spaced(t_end: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![t_end];
    }
    (0..samples)
        .map(|k| t_end * 10f64.powf(-3.0 * (1.0 - k as f64 / (samples - 1) as f64)))
        .collect()
}

/// `(1/(αAt))^{1/α} e^{Bt}`.
pub fn gronwall_bound(a: f64, b: f64, alpha: f64, t: f64) -> f64 {
    (1.0 / (alpha * a * t)).powf(1.0 / alpha) * (b * t).exp()
}

/// Integrates the extremal `g' = Bg - Ag^{1+α}` from `g₀` and checks
/// `g(t) ≤ (1/(αAt))^{1/α}e^{Bt}` at log-spaced sample times; `lhs` is the
/// largest ratio of the two sides.
pub fn gronwall_superlinear_check(a: f64, b: f64, alpha: f64, g0: f64, t_end: f64, samples: usize) -> Result<EstimateReport> {
    if !(a > 0.0 && alpha > 0.0 && t_end > 0.0) || !(b >= 0.0 && g0 >= 0.0) || samples == 0 {
        return Err(invalid("need A, alpha, T > 0, B, g0 >= 0 and at least one sample"));
    }
    let times = log_spaced(t_end, samples);
    let values = integrate_scalar(|_, g| b * g - a * g.max(0.0).powf(1.0 + alpha), g0, &times, 1e-12, 1e-14)?;
    let mut worst = 0.0f64;
    let mut at_end = (0.0, 0.0);
    for (t, g) in times.iter().zip(&values) {
        let bound = gronwall_bound(a, b, alpha, *t);
        worst = worst.max(g / bound);
        at_end = (*g, bound);
    }
    Ok(EstimateReport::new(CheckKind::Lemma2_2, worst, worst <= 1.0 + GRONWALL_SLACK)
        .factor("value_at_T", at_end.0)
        .factor("bound_at_T", at_end.1)
        .factor("slack", GRONWALL_SLACK)
        .meta_f64("A", a)
        .meta_f64("B", b)
        .meta_f64("alpha", alpha)
        .meta_f64("g0", g0)
        .meta_f64("T", t_end)
        .meta("samples", samples as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let times = [0.5, 1.0, 2.0];
        let v = integrate_scalar(|_, y| -y, 1.0, &times, 1e-12, 1e-14).unwrap();
        for (t, y) in times.iter().zip(v) {
            assert!((y - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_case() {
        let rep = gronwall_superlinear_check(1.0, 0.0, 1.0, 10.0, 1.0, 10).unwrap();
        assert!(rep.pass);
        assert!((rep.rhs_factors["value_at_T"] - 1.0 / 1.1).abs() < 1e-8);
        assert!((rep.rhs_factors["bound_at_T"] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_initial_value() {
        let rep = gronwall_superlinear_check(1.0, 1.0, 1.0, 0.0, 1.0, 5).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.lhs, 0.0);
    }

    #[test]
    fn log_spacing() {
        let t = log_spaced(2.0, 50);
        assert_eq!(t.len(), 50);
        assert!((t[0] - 2e-3).abs() < 1e-15);
        assert_eq!(*t.last().unwrap(), 2.0);
    }
}

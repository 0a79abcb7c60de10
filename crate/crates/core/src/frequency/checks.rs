use super::cutoff::CutoffFamily;
use super::function::{gaussian_weight, weighted_parts, FrequencyTrace};
use crate::dynamics::{NonlinearityKind, Trajectory};
use crate::error::{Error, Result};
use crate::report::{CheckKind, EstimateReport};
use crate::stats::centered_derivative;

/// Relative slack of the frequency inequalities, absorbing time
/// differencing error.
pub const FREQUENCY_SLACK: f64 = 0.05;

/// Checks `½(d/dt)∫|φ_j|²G + N∫|φ_j|²G = ∫φ_j(∂ₜφ_j - Δφ_j)G` at the
/// snapshot nearest `t`, with centered time differences and spectral
/// Laplacian. `lhs` is the relative residual.
pub fn variational_identity_check(
    phi: &Trajectory,
    cutoff: &CutoffFamily,
    h: f64,
    t_final: f64,
    t: f64,
) -> Result<EstimateReport> {
    let k = phi.nearest_index(t);
    if k == 0 || k + 1 >= phi.len() || phi.times()[k + 1] > t_final + 1e-12 {
        return Err(Error::BoundarySample(k));
    }
    let times = phi.times();
    let eta = cutoff.values.values();
    let mass_at = |idx: usize| -> Result<(f64, f64)> {
        let w = gaussian_weight(phi.spec(), &cutoff.center, h, times[idx], t_final)?;
        weighted_parts(&phi.fields()[idx], cutoff, &w)
    };
    let (_, m_prev) = mass_at(k - 1)?;
    let (num, m_mid) = mass_at(k)?;
    let (_, m_next) = mass_at(k + 1)?;
    if !(m_mid > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    let mass_rate = centered_derivative(&times[k - 1..=k + 1], &[m_prev, m_mid, m_next], 1);

    let local = cutoff.values.mul(&phi.fields()[k])?;
    let lap = local.laplacian();
    let weight = gaussian_weight(phi.spec(), &cutoff.center, h, times[k], t_final)?;
    let (prev, mid, next) = (phi.fields()[k - 1].values(), local.values(), phi.fields()[k + 1].values());
    let mut rhs = 0.0;
    for i in 0..mid.len() {
        if eta[i] == 0.0 {
            continue;
        }
        let dt_local = eta[i]
            * centered_derivative(&times[k - 1..=k + 1], &[prev[i], phi.fields()[k].values()[i], next[i]], 1);
        rhs += mid[i] * (dt_local - lap.values()[i]) * weight.values()[i];
    }
    rhs *= phi.spec().cell_volume();

    let lhs = 0.5 * mass_rate + num;
    let scale = (0.5 * mass_rate).abs().max(num.abs()).max(rhs.abs());
    let residual = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
    let dt = (times[k + 1] - times[k - 1]) / 2.0;
    let allowance = FREQUENCY_SLACK + dt * dt;
    Ok(EstimateReport::new(CheckKind::Lemma2_4I, residual, residual < allowance)
        .factor("identity_lhs", lhs)
        .factor("identity_rhs", rhs)
        .factor("allowance", allowance)
        .meta_f64("t", times[k])
        .meta_f64("h", h)
        .meta_f64("T", t_final)
        .meta_f64("R", cutoff.big_r)
        .meta_f64("sample_dt", dt))
}

/// Checks `N' ≤ N/(T-t+h) + ∫(∂ₜφ_j - Δφ_j)²G/∫|φ_j|²G` at every interior
/// sample of `trace`, where `φ = y₁ - y₂` and the source
/// `∂ₜφ_j - Δφ_j = -η_j F - 2∇φ·∇η_j - φΔη_j` uses the exact
/// `F = f(y₁) - f(y₂)`. `lhs` is the largest ratio `N'/RHS`.
pub fn frequency_derivative_check(
    trace: &FrequencyTrace,
    y1: &Trajectory,
    y2: &Trajectory,
    cutoff: &CutoffFamily,
    l_m: f64,
) -> Result<EstimateReport> {
    if trace.len() < 3 {
        return Err(Error::InsufficientSamples { need: 3, got: trace.len() });
    }
    let phi = y1.difference(y2)?;
    let fspec = *y1.fspec();
    let eta = cutoff.values.values();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0u64;
    let mut worst_source_ratio = 0.0f64;
    for k in 1..trace.len() - 1 {
        let t = trace.times[k];
        let idx = phi.nearest_index(t);
        let field = &phi.fields()[idx];
        let weight = gaussian_weight(phi.spec(), &cutoff.center, trace.h, t, trace.t_final)?;
        let grad = field.gradient();
        let v = field.values();
        let (a, b) = (y1.fields()[idx].values(), y2.fields()[idx].values());
        let mut source = 0.0;
        for i in 0..v.len() {
            if eta[i] == 0.0 && cutoff.laplacian.values()[i] == 0.0 {
                continue;
            }
            let f = if fspec.kind == NonlinearityKind::Zero { 0.0 } else { fspec.eval(a[i]) - fspec.eval(b[i]) };
            if v[i] != 0.0 {
                worst_source_ratio = worst_source_ratio.max(f.abs() / v[i].abs());
            }
            let dot: f64 = grad.iter().zip(&cutoff.gradient).map(|(gp, ge)| gp.values()[i] * ge.values()[i]).sum();
            let s = -eta[i] * f - 2.0 * dot - v[i] * cutoff.laplacian.values()[i];
            source += s * s * weight.values()[i];
        }
        source *= phi.spec().cell_volume();
        let rhs = trace.n[k] / (trace.t_final - t + trace.h) + source / trace.den[k];
        let slope = centered_derivative(&trace.times, &trace.n, k);
        let dt = (trace.times[k + 1] - trace.times[k - 1]) / 2.0;
        if slope > rhs * (1.0 + FREQUENCY_SLACK) + dt * dt {
            violations += 1;
        }
        worst = worst.max(slope / rhs);
    }
    Ok(EstimateReport::new(CheckKind::Lemma2_4Ii, worst, violations == 0)
        .factor("slack", FREQUENCY_SLACK)
        .factor("L_M", l_m)
        .factor("source_lipschitz_ratio", worst_source_ratio)
        .meta("j", trace.j as u64)
        .meta("violations", violations)
        .meta("samples", trace.len() as u64)
        .meta_f64("h", trace.h)
        .meta_f64("T", trace.t_final)
        .meta("fspec", fspec.kind.name()))
}

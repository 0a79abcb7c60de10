//! The heat semigroup `e^{tΔ}` as the spectral multiplier `e^{-|ξ|²t}`, the
//! normalized heat kernel, and the Lᵖ–L^q smoothing check.

use log::warn;

use crate::error::{invalid, Result};
use crate::grid::{spectral, Exponent, Field, GridSpec, Point};
use crate::report::{CheckKind, EstimateReport};

/// Default relative slack on the Lᵖ–L^q bound, covering quadrature error.
pub const LP_LQ_TOL: f64 = 1e-8;

/// `e^{tΔ}f`. The time tag, if any, is advanced by `t`.
pub fn heat_propagate(field: &Field, t: f64) -> Result<Field> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(invalid(format!("propagation time t = {t} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(field.clone());
    }
    let values = spectral::apply_radial(field.spec(), field.values(), |k2| (-k2 * t).exp());
    Ok(Field::from_parts(*field.spec(), values, field.time().map(|s| s + t)))
}

/// Samples of `(4πt)^{-n/2} e^{-|x-c|²/(4t)}` with minimum-image distance.
pub fn heat_kernel(spec: &GridSpec, t: f64, center: &Point) -> Result<Field> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid(format!("kernel time t = {t} must be positive")));
    }
    let x = spec.half_width();
    if t > x * x / 16.0 {
        warn!("heat kernel at t = {t} is wide relative to the box (X = {x}); periodic images are not negligible");
    }
    let n = spec.dim();
    let norm = (4.0 * std::f64::consts::PI * t).powf(-(n as f64) / 2.0);
    let values = (0..spec.len())
        .map(|i| norm * (-spec.periodic_dist_sq(&spec.point(i), center) / (4.0 * t)).exp())
        .collect();
    Field::new(*spec, values)
}

/// Checks `‖e^{tΔ}f‖_p ≤ (4πt)^{-(n/2)(1/q-1/p)}‖f‖_q`.
pub fn lp_lq_check(field: &Field, t: f64, q: Exponent, p: Exponent) -> Result<EstimateReport> {
    lp_lq_check_with_tol(field, t, q, p, LP_LQ_TOL)
}

pub fn lp_lq_check_with_tol(
    field: &Field,
    t: f64,
    q: Exponent,
    p: Exponent,
    tol: f64,
) -> Result<EstimateReport> {
    if !(t > 0.0) {
        return Err(invalid(format!("t = {t} must be positive")));
    }
    if let Exponent::Finite(qv) = q {
        if qv < 1.0 {
            return Err(invalid(format!("q = {qv} must be >= 1")));
        }
    }
    if q.as_f64() > p.as_f64() {
        return Err(invalid(format!("q = {} exceeds p = {}", q.as_f64(), p.as_f64())));
    }
    let n = field.spec().dim() as f64;
    let evolved = heat_propagate(field, t)?;
    let lhs = evolved.lp_norm(p)?;
    let fq = field.lp_norm(q)?;
    let factor = (4.0 * std::f64::consts::PI * t).powf(-(n / 2.0) * (q.reciprocal() - p.reciprocal()));
    let rhs = factor * fq;
    Ok(EstimateReport::new(CheckKind::Eq2_1, lhs, lhs <= rhs * (1.0 + tol))
        .factor("rhs", rhs)
        .factor("kernel_factor", factor)
        .factor("norm_q", fq)
        .meta_f64("t", t)
        .meta_f64("p", p.as_f64())
        .meta_f64("q", q.as_f64())
        .meta_f64("tol", tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec1() -> GridSpec {
        GridSpec::new(1, 256, 10.0).unwrap()
    }

    #[test]
    fn constant_is_invariant() {
        let f = Field::constant(spec1(), 3.0);
        let g = heat_propagate(&f, 2.5).unwrap();
        assert!(g.sub(&f).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn zero_time_is_identity() {
        let f = Field::from_fn(spec1(), |x| x[0].sin()).unwrap();
        assert_eq!(heat_propagate(&f, 0.0).unwrap(), f);
    }

    #[test]
    fn negative_time_rejected() {
        let f = Field::constant(spec1(), 1.0);
        assert!(heat_propagate(&f, -1.0).is_err());
        assert!(heat_kernel(&spec1(), 0.0, &Point::origin()).is_err());
    }

    #[test]
    fn cosine_mode_decays_exactly() {
        let s = spec1();
        let k = 3.0 * PI / 10.0;
        let f = Field::from_fn(s, |x| (k * x[0]).cos()).unwrap();
        let t = 0.7;
        let g = heat_propagate(&f, t).unwrap();
        let exact = f.scale((-k * k * t).exp());
        let rel = g.sub(&exact).unwrap().max_abs() / exact.max_abs();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn gaussian_evolves_in_closed_form() {
        let s = spec1();
        let (s0, t) = (0.25, 0.25);
        let f = Field::from_fn(s, |x| (-x[0] * x[0] / (4.0 * s0)).exp()).unwrap();
        let g = heat_propagate(&f, t).unwrap();
        let amp = (s0 / (s0 + t)).sqrt();
        assert!((amp - 0.5f64.sqrt()).abs() < 1e-15);
        let exact = Field::from_fn(s, |x| amp * (-x[0] * x[0] / (4.0 * (s0 + t))).exp()).unwrap();
        assert!(g.sub(&exact).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn kernel_peak_and_mass() {
        let s = spec1();
        let t = 1.0 / (4.0 * PI);
        let k = heat_kernel(&s, t, &Point::origin()).unwrap();
        assert!((k.max_abs() - 1.0).abs() < 1e-14);
        let mass = k.lp_norm(Exponent::Finite(1.0)).unwrap();
        assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kernel_semigroup() {
        let s = spec1();
        let c = Point::new(&[1.5]);
        let k1 = heat_kernel(&s, 0.2, &c).unwrap();
        let k12 = heat_kernel(&s, 0.5, &c).unwrap();
        let evolved = heat_propagate(&k1, 0.3).unwrap();
        let rel = evolved.sub(&k12).unwrap().l2_sq().sqrt() / k12.l2_sq().sqrt();
        assert!(rel < 1e-8, "{rel}");
    }

    #[test]
    fn lp_lq_equal_exponents_is_contraction() {
        let s = spec1();
        let f = Field::from_fn(s, |x| (x[0]).sin() * (-x[0] * x[0] / 8.0).exp()).unwrap();
        for q in [1.0, 2.0, 3.0] {
            let r = lp_lq_check(&f, 0.4, Exponent::Finite(q), Exponent::Finite(q)).unwrap();
            assert!(r.pass);
            assert!((r.rhs_factors["kernel_factor"] - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lp_lq_narrow_gaussian_l1_to_linf() {
        let s = spec1();
        let f = Field::from_fn(s, |x| (-x[0] * x[0] / (4.0 * 0.01)).exp()).unwrap();
        let r = lp_lq_check(&f, 1.0, Exponent::Finite(1.0), Exponent::Infinity).unwrap();
        assert!((r.rhs_factors["kernel_factor"] - 0.282_094_791_773_878_1).abs() < 1e-12);
        assert!(r.pass);
        assert!(r.lhs < r.rhs_factors["rhs"]);
    }

    #[test]
    fn lp_lq_rejects_q_above_p() {
        let f = Field::constant(spec1(), 1.0);
        assert!(lp_lq_check(&f, 1.0, Exponent::Finite(3.0), Exponent::Finite(2.0)).is_err());
    }
}

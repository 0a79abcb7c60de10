//! Periodic lattice truncation of ℝⁿ and the norms used throughout the
//! estimates.
//!
//! The box is `[-X, X)ⁿ` sampled at `m` points per axis, `x_i = -X + i·dx`
//! with `dx = 2X/m`. Storage is row-major with axis 0 slowest. Every
//! integral is a plain Riemann sum, which is spectrally accurate for smooth
//! periodic integrands.

mod snapshot;
pub(crate) mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};

/// Default fraction of total L² mass allowed in the boundary layer before the
/// truncation of ℝⁿ is considered inaccurate.
pub const DEFAULT_TRUNCATION_TOL: f64 = 1e-12;

/// Lattice geometry: dimension `n`, points per axis `m`, half-width `X`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    m: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(n: usize, m: usize, half_width: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(invalid(format!("dimension n = {n} must be 1, 2 or 3")));
        }
        if m < 16 || !m.is_power_of_two() {
            return Err(invalid(format!("m = {m} must be a power of two >= 16")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid(format!("half-width X = {half_width} must be positive")));
        }
        Ok(Self { n, m, half_width })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Lattice spacing `2X/m`. Exact in binary floating point since `m` is a
    /// power of two.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    /// Number of lattice sites, `mⁿ`.
    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `dxⁿ` of a single cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.n as i32)
    }

    pub fn box_volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.n as i32)
    }

    /// Coordinate of lattice index `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    /// Angular wavenumber `ξ = πk/X` of FFT slot `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        std::f64::consts::PI * spectral::signed_index(i, self.m) as f64 / self.half_width
    }

    /// Largest `|ξ|` representable on the lattice (all axes at Nyquist).
    pub fn max_wavenumber(&self) -> f64 {
        let k = std::f64::consts::PI * (self.m / 2) as f64 / self.half_width;
        k * (self.n as f64).sqrt()
    }

    pub fn point(&self, flat: usize) -> Point {
        let idx = spectral::unflatten(self, flat);
        let mut c = [0.0; 3];
        for a in 0..self.n {
            c[a] = self.coord(idx[a]);
        }
        Point(c)
    }

    /// Squared minimum-image distance between two points of the periodic box.
    pub fn periodic_dist_sq(&self, a: &Point, b: &Point) -> f64 {
        let period = 2.0 * self.half_width;
        (0..self.n)
            .map(|i| {
                let mut d = (a.0[i] - b.0[i]).rem_euclid(period);
                if d > self.half_width {
                    d -= period;
                }
                d * d
            })
            .sum()
    }

    /// Signed minimum-image displacement `a - b`, per axis.
    pub fn periodic_delta(&self, a: &Point, b: &Point) -> [f64; 3] {
        let period = 2.0 * self.half_width;
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let mut d = (a.0[i] - b.0[i]).rem_euclid(period);
            if d >= self.half_width {
                d -= period;
            }
            *o = d;
        }
        out
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// A point of the box; only the first `n` coordinates are meaningful.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        let mut c = [0.0; 3];
        for (dst, src) in c.iter_mut().zip(coords) {
            *dst = *src;
        }
        Point(c)
    }

    pub fn origin() -> Self {
        Point([0.0; 3])
    }

    pub fn coords(&self, n: usize) -> &[f64] {
        &self.0[..n]
    }
}

/// Exponent of an Lᵖ norm; `Infinity` is the sup norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn from_f64(p: f64) -> Self {
        if p.is_infinite() && p > 0.0 {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => *p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

/// Scalar field sampled on the lattice, optionally tagged with model time.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    spec: GridSpec,
    values: Vec<f64>,
    time: Option<f64>,
}

impl Field {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(invalid(format!(
                "field has {} values, grid needs {}",
                values.len(),
                spec.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at site {i}")));
        }
        Ok(Self { spec, values, time: None })
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_parts(spec: GridSpec, values: Vec<f64>, time: Option<f64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values, time }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self::from_parts(spec, vec![0.0; spec.len()], None)
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Self::from_parts(spec, vec![c; spec.len()], None)
    }

    /// Sample `f` at every lattice point. Non-finite samples are rejected.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = spec.dim();
        let values = (0..spec.len()).map(|i| f(spec.point(i).coords(n))).collect();
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn time(&self) -> Option<f64> {
        self.time
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub(crate) fn set_time(&mut self, t: Option<f64>) {
        self.time = t;
    }

    /// Pointwise map; fails if the result is not finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Field> {
        let mut out = Field::new(self.spec, self.values.iter().map(|&v| f(v)).collect())?;
        out.time = self.time;
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Field {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        self.spec.check_same(&other.spec)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut out = Field::new(self.spec, values)?;
        out.time = self.time;
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Riemann-sum Lᵖ norm `(dxⁿ Σ|v|ᵖ)^{1/p}`; `p = ∞` gives `max|v|`.
    pub fn lp_norm(&self, p: Exponent) -> Result<f64> {
        match p {
            Exponent::Infinity => Ok(self.max_abs()),
            Exponent::Finite(p) if p >= 1.0 => {
                let w = self.spec.cell_volume();
                if p == 2.0 {
                    return Ok(self.l2_sq().sqrt());
                }
                let scale = self.max_abs();
                if scale == 0.0 {
                    return Ok(0.0);
                }
                // scale out the max so large p does not overflow
                let s: f64 = self.values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
                Ok(scale * (w * s).powf(1.0 / p))
            }
            Exponent::Finite(p) => Err(invalid(format!("Lp exponent p = {p} is below 1"))),
        }
    }

    /// `∫|v|²`, the squared L² norm.
    pub fn l2_sq(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn l2_inner(&self, other: &Field) -> Result<f64> {
        self.spec.check_same(&other.spec)?;
        Ok(self.spec.cell_volume()
            * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    /// Discrete Hˢ norm through the Fourier multiplier `(1+|ξ|²)^s`,
    /// normalized so that `s = 0` reproduces the L² norm (Parseval).
    pub fn sobolev_norm(&self, s: i32) -> f64 {
        self.sobolev_inner(self, s)
            .expect("same grid")
            .max(0.0)
            .sqrt()
    }

    /// Hˢ inner product `Σ_ξ (1+|ξ|²)^s Re(û_ξ conj(v̂_ξ))·dxⁿ/mⁿ`.
    pub fn sobolev_inner(&self, other: &Field, s: i32) -> Result<f64> {
        self.spec.check_same(&other.spec)?;
        let a = spectral::forward(&self.spec, &self.values);
        let b = if std::ptr::eq(self, other) {
            a.clone()
        } else {
            spectral::forward(&other.spec, &other.values)
        };
        let k2 = spectral::wavenumber_sq(&self.spec);
        let weight = self.spec.cell_volume() / self.spec.len() as f64;
        let sum: f64 = a
            .iter()
            .zip(&b)
            .zip(&k2)
            .map(|((x, y), k)| (1.0 + k).powi(s) * (x * y.conj()).re)
            .sum();
        Ok(weight * sum)
    }

    /// Spectral gradient of the trigonometric interpolant, one field per
    /// axis. The Nyquist mode is dropped, as usual for odd derivatives.
    pub fn gradient(&self) -> Vec<Field> {
        let spec = self.spec;
        let coeffs = spectral::forward(&spec, &self.values);
        let m = spec.points_per_axis();
        (0..spec.dim())
            .map(|axis| {
                let mut c = coeffs.clone();
                for (flat, v) in c.iter_mut().enumerate() {
                    let i = spectral::unflatten(&spec, flat)[axis];
                    if m.is_multiple_of(2) && i == m / 2 {
                        *v = num_complex::Complex64::new(0.0, 0.0);
                    } else {
                        *v *= num_complex::Complex64::new(0.0, spec.wavenumber(i));
                    }
                }
                Field::from_parts(spec, spectral::inverse_real(&spec, c), self.time)
            })
            .collect()
    }

    /// Spectral Laplacian (multiplier `-|ξ|²`).
    pub fn laplacian(&self) -> Field {
        let values = spectral::apply_radial(&self.spec, &self.values, |k2| -k2);
        Field::from_parts(self.spec, values, self.time)
    }

    /// `dxⁿ Σ mask·|v|²`.
    pub fn masked_l2(&self, mask: &Field) -> Result<f64> {
        self.spec.check_same(&mask.spec)?;
        Ok(self.spec.cell_volume()
            * self
                .values
                .iter()
                .zip(&mask.values)
                .map(|(v, w)| w * v * v)
                .sum::<f64>())
    }

    /// Fraction of the L² mass sitting in the outer shell `max_i |x_i| ≥ 0.9X`.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let total = self.l2_sq();
        if total == 0.0 {
            return 0.0;
        }
        let n = self.spec.dim();
        let edge = 0.9 * self.spec.half_width();
        let shell: f64 = (0..self.spec.len())
            .filter(|&i| self.spec.point(i).coords(n).iter().any(|x| x.abs() >= edge))
            .map(|i| self.values[i] * self.values[i])
            .sum();
        shell * self.spec.cell_volume() / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec1(m: usize, x: f64) -> GridSpec {
        GridSpec::new(1, m, x).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(GridSpec::new(4, 16, 1.0).is_err());
        assert!(GridSpec::new(1, 24, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 1.0).is_err());
        assert!(GridSpec::new(1, 16, 0.0).is_err());
    }

    #[test]
    fn dx_times_m_is_box_length() {
        for &(m, x) in &[(16, 1.0), (256, 10.0), (512, 7.3)] {
            let s = spec1(m, x);
            assert_eq!(s.dx() * m as f64, 2.0 * x);
        }
    }

    #[test]
    fn lp_norm_of_constant() {
        let f = Field::constant(spec1(64, 1.0), 2.0);
        let v = f.lp_norm(Exponent::Finite(2.0)).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((f.lp_norm(Exponent::Finite(1.0)).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(f.lp_norm(Exponent::Infinity).unwrap(), 2.0);
    }

    #[test]
    fn lp_norm_of_zero_field() {
        let f = Field::zeros(spec1(32, 3.0));
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert_eq!(f.lp_norm(Exponent::Finite(p)).unwrap(), 0.0);
        }
        assert_eq!(f.lp_norm(Exponent::Infinity).unwrap(), 0.0);
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let f = Field::constant(spec1(16, 1.0), 1.0);
        assert!(matches!(f.lp_norm(Exponent::Finite(0.5)), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gaussian_l2_norm_matches_closed_form() {
        let f = Field::from_fn(spec1(256, 10.0), |x| (-x[0] * x[0]).exp()).unwrap();
        let v = f.lp_norm(Exponent::Finite(2.0)).unwrap();
        assert!((v - (PI / 2.0).powf(0.25)).abs() < 1e-8, "{v}");
    }

    #[test]
    fn sobolev_norm_of_constant_equals_l2() {
        let s = spec1(32, 1.5);
        let f = Field::constant(s, -3.0);
        let l2 = 3.0 * (2.0 * 1.5f64).sqrt();
        assert!((f.sobolev_norm(-1) - l2).abs() < 1e-12);
        assert!((f.sobolev_norm(1) - l2).abs() < 1e-12);
    }

    #[test]
    fn sobolev_single_mode_ratio() {
        let x = 2.0;
        let f = Field::from_fn(spec1(64, x), |p| (PI * p[0] / x).cos()).unwrap();
        let ratio = f.sobolev_norm(1).powi(2) / f.l2_sq();
        assert!((ratio - (1.0 + (PI / x).powi(2))).abs() < 1e-12);
        let ratio_m = f.sobolev_norm(-1).powi(2) / f.l2_sq();
        assert!((ratio_m - 1.0 / (1.0 + (PI / x).powi(2))).abs() < 1e-12);
    }

    #[test]
    fn sobolev_of_zero_field() {
        let f = Field::zeros(spec1(16, 1.0));
        assert_eq!(f.sobolev_norm(1), 0.0);
        assert_eq!(f.sobolev_norm(-1), 0.0);
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let s = GridSpec::new(2, 16, 1.0).unwrap();
        let g = Field::constant(s, 5.0).gradient();
        assert_eq!(g.len(), 2);
        for c in g {
            assert!(c.max_abs() < 1e-13);
        }
    }

    #[test]
    fn gradient_of_pure_and_mixed_modes() {
        let x = 3.0;
        let k1 = PI / x;
        let k2 = 4.0 * PI / x;
        let s = spec1(64, x);
        let f = Field::from_fn(s, |p| (k1 * p[0]).sin()).unwrap();
        let g = &f.gradient()[0];
        let exact = Field::from_fn(s, |p| k1 * (k1 * p[0]).cos()).unwrap();
        assert!(g.sub(&exact).unwrap().max_abs() < 1e-10);

        let f2 = Field::from_fn(s, |p| (k1 * p[0]).sin() + 0.3 * (k2 * p[0]).cos()).unwrap();
        let exact2 = Field::from_fn(s, |p| {
            k1 * (k1 * p[0]).cos() - 0.3 * k2 * (k2 * p[0]).sin()
        })
        .unwrap();
        assert!(f2.gradient()[0].sub(&exact2).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn gradient_axis_order_in_2d() {
        let x = 1.0;
        let s = GridSpec::new(2, 32, x).unwrap();
        let f = Field::from_fn(s, |p| (PI * p[1]).sin()).unwrap();
        let g = f.gradient();
        assert!(g[0].max_abs() < 1e-12);
        let exact = Field::from_fn(s, |p| PI * (PI * p[1]).cos()).unwrap();
        assert!(g[1].sub(&exact).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn masked_l2_cases() {
        let s = spec1(64, 1.0);
        let f = Field::constant(s, 1.0);
        let full = Field::constant(s, 1.0);
        let empty = Field::zeros(s);
        assert!((f.masked_l2(&full).unwrap() - f.l2_sq()).abs() < 1e-14);
        assert_eq!(f.masked_l2(&empty).unwrap(), 0.0);
        let half = Field::from_fn(s, |p| if p[0] < 0.0 { 1.0 } else { 0.0 }).unwrap();
        assert!((f.masked_l2(&half).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn masked_l2_grid_mismatch() {
        let f = Field::constant(spec1(32, 1.0), 1.0);
        let mask = Field::constant(spec1(64, 1.0), 1.0);
        assert!(matches!(f.masked_l2(&mask), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn non_finite_values_rejected() {
        let s = spec1(16, 1.0);
        let mut v = vec![0.0; 16];
        v[3] = f64::NAN;
        assert!(matches!(Field::new(s, v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn periodic_distance_wraps() {
        let s = spec1(16, 1.0);
        let d = s.periodic_dist_sq(&Point::new(&[0.9]), &Point::new(&[-0.9]));
        assert!((d - 0.04).abs() < 1e-12);
    }
}

use log::warn;

use crate::dynamics::nonlinearity::NonlinearitySpec;
use crate::dynamics::trajectory::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::grid::{spectral, Field, DEFAULT_TRUNCATION_TOL};

pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Sup-norm level treated as finite-time blow-up.
    pub blowup_threshold: f64,
    /// Boundary-layer mass fraction above which a truncation warning is
    /// logged.
    pub truncation_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { blowup_threshold: DEFAULT_BLOWUP_THRESHOLD, truncation_tol: DEFAULT_TRUNCATION_TOL }
    }
}

/// Number of steps and the adjusted step so that `steps·h = t_end`.
pub(crate) fn step_count(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(invalid(format!("final time T = {t_end} must be positive")));
    }
    if !(dt > 0.0) || dt > t_end * (1.0 + 1e-12) {
        return Err(invalid(format!("step dt = {dt} must lie in (0, T]")));
    }
    let steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
    Ok((steps, t_end / steps as f64))
}

fn check_values(values: &[f64], time: f64, opts: &SolverOptions) -> Result<()> {
    let mut sup = 0.0f64;
    for v in values {
        if v.is_nan() {
            return Err(Error::NonFinite(format!("solution at t = {time}")));
        }
        sup = sup.max(v.abs());
    }
    if sup > opts.blowup_threshold {
        return Err(Error::BlowUp { time, sup, threshold: opts.blowup_threshold });
    }
    Ok(())
}

/// Strang splitting driver: exact diffusion half-steps around a pointwise
/// reaction step `reaction(values, t_mid, h)`.
pub(crate) fn strang_split(
    y0: &Field,
    t_end: f64,
    dt: f64,
    stride: usize,
    fspec: NonlinearitySpec,
    opts: &SolverOptions,
    mut reaction: impl FnMut(&mut [f64], f64, f64),
) -> Result<Trajectory> {
    if stride == 0 {
        return Err(invalid("snapshot stride must be at least 1"));
    }
    let (steps, h) = step_count(t_end, dt)?;
    let spec = *y0.spec();
    let k2 = spectral::wavenumber_sq(&spec);
    let half: Vec<f64> = k2.iter().map(|k| (-k * h / 2.0).exp()).collect();
    let full: Vec<f64> = k2.iter().map(|k| (-k * h).exp()).collect();

    let mut times = vec![0.0];
    let mut fields = vec![y0.clone()];
    let mut values = spectral::apply_multiplier(&spec, y0.values(), &half);
    let mut warned = false;
    for k in 1..=steps {
        let t = k as f64 * h;
        reaction(&mut values, t - h / 2.0, h);
        check_values(&values, t, opts)?;
        if k == steps || k % stride == 0 {
            let snap = spectral::apply_multiplier(&spec, &values, &half);
            check_values(&snap, t, opts)?;
            let field = Field::from_parts(spec, snap, Some(t));
            let frac = field.boundary_mass_fraction();
            if frac > opts.truncation_tol && !warned {
                warned = true;
                warn!("boundary mass fraction {frac:.3e} at t = {t} exceeds {:.1e}", opts.truncation_tol);
            }
            if k < steps {
                values = spectral::apply_multiplier(&spec, field.values(), &half);
            }
            times.push(t);
            fields.push(field);
        } else {
            values = spectral::apply_multiplier(&spec, &values, &full);
        }
    }
    Trajectory::new(times, fields, fspec, h, stride)
}

/// Solves `∂ₜy - Δy + f(y) = 0` on `[0, T]` by Strang splitting.
pub fn solve_semilinear(
    y0: &Field,
    fspec: NonlinearitySpec,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    solve_semilinear_with(y0, fspec, t_end, dt, stride, &SolverOptions::default())
}

pub fn solve_semilinear_with(
    y0: &Field,
    fspec: NonlinearitySpec,
    t_end: f64,
    dt: f64,
    stride: usize,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    fspec.validate()?;
    strang_split(y0, t_end, dt, stride, fspec, opts, |values, _, h| {
        if fspec.kind == crate::dynamics::NonlinearityKind::Zero {
            return;
        }
        for v in values.iter_mut() {
            *v = fspec.ode_flow(*v, h);
        }
    })
}

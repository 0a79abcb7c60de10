use num_complex::Complex64;

use crate::dynamics::nonlinearity::{NonlinearityKind, NonlinearitySpec};
use crate::error::{invalid, Error, Result};
use crate::grid::{spectral, Field};

/// Sweeps without a decrease in the iteration distance before giving up.
pub const STALL_SWEEPS: usize = 5;
/// Hard cap on the number of Picard sweeps.
pub const MAX_SWEEPS: usize = 500;

/// Fixed point of the Duhamel map
/// `Λ(ξ)(t) = e^{tΔ}y₀ - ∫₀ᵗ e^{(t-s)Δ} f(ξ(s)) ds` on `[0, T*]`, evaluated at
/// `T*`.
///
/// The time integral uses `n_quad` uniform intervals and trapezoid weights.
/// Iteration stops once the sup-in-time, sup-in-space distance between
/// successive iterates drops below `tol`.
pub fn picard_solve(
    y0: &Field,
    fspec: NonlinearitySpec,
    t_star: f64,
    n_quad: usize,
    tol: f64,
) -> Result<Field> {
    fspec.validate()?;
    if !(t_star > 0.0) || !t_star.is_finite() {
        return Err(invalid(format!("T* = {t_star} must be positive")));
    }
    if n_quad == 0 {
        return Err(invalid("n_quad must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance {tol} must be positive")));
    }
    let spec = *y0.spec();
    let h = t_star / n_quad as f64;
    let step: Vec<f64> = spectral::wavenumber_sq(&spec).iter().map(|k| (-k * h).exp()).collect();

    // e^{t_i Δ} y₀ at every node, kept in spectral space.
    let mut free = Vec::with_capacity(n_quad + 1);
    free.push(spectral::forward(&spec, y0.values()));
    for i in 1..=n_quad {
        let next: Vec<Complex64> = free[i - 1].iter().zip(&step).map(|(c, g)| c * g).collect();
        free.push(next);
    }
    let mut iterate: Vec<Vec<f64>> =
        free.iter().map(|c| spectral::inverse_real(&spec, c.clone())).collect();
    if fspec.kind == NonlinearityKind::Zero {
        let last = iterate.pop().unwrap();
        return Ok(Field::from_parts(spec, last, Some(t_star)));
    }

    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for sweep in 1..=MAX_SWEEPS {
        let forcing: Vec<Vec<Complex64>> = iterate
            .iter()
            .map(|v| {
                let fv: Vec<f64> = v.iter().map(|&y| fspec.eval(y)).collect();
                spectral::forward(&spec, &fv)
            })
            .collect();
        // acc_i = Σ_{k≤i} e^{(t_i-t_k)Δ} F_k; trapezoid halves the endpoints.
        let mut acc = forcing[0].clone();
        let mut first = forcing[0].clone();
        let mut next = Vec::with_capacity(n_quad + 1);
        next.push(iterate[0].clone());
        for i in 1..=n_quad {
            for ((a, f0), g) in acc.iter_mut().zip(first.iter_mut()).zip(&step) {
                *a *= g;
                *f0 *= g;
            }
            for (a, f) in acc.iter_mut().zip(&forcing[i]) {
                *a += f;
            }
            let coeffs: Vec<Complex64> = free[i]
                .iter()
                .zip(&acc)
                .zip(&first)
                .zip(&forcing[i])
                .map(|(((y, a), f0), fi)| y - h * (a - 0.5 * f0 - 0.5 * fi))
                .collect();
            next.push(spectral::inverse_real(&spec, coeffs));
        }
        let dist = iterate
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0f64, |m, d| if d.is_nan() { f64::NAN } else { m.max(d) });
        if !dist.is_finite() {
            return Err(Error::NoContraction(format!("iterate diverged at sweep {sweep}")));
        }
        iterate = next;
        if dist < tol {
            let last = iterate.pop().unwrap();
            return Ok(Field::from_parts(spec, last, Some(t_star)));
        }
        if dist < best {
            best = dist;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_SWEEPS {
                return Err(Error::NoContraction(format!(
                    "distance {dist:.3e} failed to decrease for {STALL_SWEEPS} sweeps"
                )));
            }
        }
    }
    Err(Error::NoContraction(format!("no convergence within {MAX_SWEEPS} sweeps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::semigroup::heat_propagate;

    #[test]
    fn linear_case_is_heat_flow() {
        let spec = GridSpec::new(1, 64, 5.0).unwrap();
        let y0 = Field::from_fn(spec, |x| (-x[0] * x[0]).exp()).unwrap();
        let got = picard_solve(&y0, NonlinearitySpec::zero(), 0.2, 16, 1e-12).unwrap();
        let exact = heat_propagate(&y0, 0.2).unwrap();
        let err = got.sub(&exact).unwrap().max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn constant_cubic_matches_ode() {
        let spec = GridSpec::new(1, 16, 1.0).unwrap();
        let f = NonlinearitySpec::power_odd(1.0, 3.0).unwrap();
        let got = picard_solve(&Field::constant(spec, 1.0), f, 0.05, 64, 1e-13).unwrap();
        let exact = 1.0 / 1.1f64.sqrt();
        assert!((got.values()[0] - exact).abs() < 1e-5);
        assert!((exact - 0.953463).abs() < 1e-6);
    }

    #[test]
    fn long_horizon_fails_to_contract() {
        let spec = GridSpec::new(1, 32, 4.0).unwrap();
        let f = NonlinearitySpec::power_odd(1.0, 3.0).unwrap();
        let err = picard_solve(&Field::constant(spec, 2.0), f, 5.0, 64, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NoContraction(_)));
    }
}

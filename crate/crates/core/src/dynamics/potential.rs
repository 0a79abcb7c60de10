use crate::dynamics::nonlinearity::NonlinearitySpec;
use crate::dynamics::solver::{strang_split, SolverOptions};
use crate::dynamics::trajectory::Trajectory;
use crate::error::{invalid, Result};
use crate::grid::{Exponent, Field};

/// Coefficient `a(x, t)` of `∂ₜu - Δu + a u = 0`.
#[derive(Clone, Debug)]
pub enum Potential {
    Static(Field),
    /// Samples at increasing times, linearly interpolated in between and
    /// held constant outside the sampled range.
    Sampled { times: Vec<f64>, fields: Vec<Field> },
}

impl Potential {
    pub fn sampled(times: Vec<f64>, fields: Vec<Field>) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(invalid("potential needs matching nonempty samples"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("potential sample times must increase"));
        }
        for f in &fields[1..] {
            fields[0].spec().check_same(f.spec())?;
        }
        Ok(Potential::Sampled { times, fields })
    }

    /// Uses the snapshots of a trajectory as potential samples.
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        Potential::Sampled { times: traj.times().to_vec(), fields: traj.fields().to_vec() }
    }

    pub fn samples(&self) -> Vec<&Field> {
        match self {
            Potential::Static(f) => vec![f],
            Potential::Sampled { fields, .. } => fields.iter().collect(),
        }
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        match self {
            Potential::Static(f) => f.values().to_vec(),
            Potential::Sampled { times, fields } => {
                let k = times.partition_point(|&s| s <= t);
                if k == 0 {
                    return fields[0].values().to_vec();
                }
                if k == times.len() {
                    return fields[k - 1].values().to_vec();
                }
                let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                fields[k - 1]
                    .values()
                    .iter()
                    .zip(fields[k].values())
                    .map(|(a, b)| (1.0 - w) * a + w * b)
                    .collect()
            }
        }
    }

    /// `sup_t ‖a(t)‖_σ` over the stored samples.
    pub fn sup_norm(&self, sigma: Exponent) -> Result<f64> {
        let mut best = 0.0f64;
        for f in self.samples() {
            best = best.max(f.lp_norm(sigma)?);
        }
        Ok(best)
    }
}

/// Solves `∂ₜu - Δu + a(x,t)u = 0` by Strang splitting with the exact
/// reaction flow `u ↦ u·e^{-a(t_mid)h}`.
pub fn solve_linear_potential(
    u0: &Field,
    potential: &Potential,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory> {
    for a in potential.samples() {
        u0.spec().check_same(a.spec())?;
    }
    let opts = SolverOptions::default();
    strang_split(u0, t_end, dt, stride, NonlinearitySpec::zero(), &opts, |values, t_mid, h| {
        let a = potential.at(t_mid);
        for (v, a) in values.iter_mut().zip(a) {
            *v *= (-a * h).exp();
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::gaussian;
    use crate::grid::{GridSpec, Point};
    use crate::semigroup::heat_propagate;

    #[test]
    fn constant_potential_factorizes() {
        let spec = GridSpec::new(1, 128, 8.0).unwrap();
        let u0 = gaussian(&spec, &Point::origin(), 0.2, 1.0);
        let c = 0.7;
        let tr =
            solve_linear_potential(&u0, &Potential::Static(Field::constant(spec, c)), 0.4, 0.01, 40).unwrap();
        let exact = heat_propagate(&u0, 0.4).unwrap().scale((-c * 0.4f64).exp());
        assert!(tr.last().sub(&exact).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn zero_potential_is_heat() {
        let spec = GridSpec::new(1, 64, 6.0).unwrap();
        let u0 = gaussian(&spec, &Point::origin(), 0.5, 1.0);
        let tr = solve_linear_potential(&u0, &Potential::Static(Field::zeros(spec)), 0.3, 0.05, 1).unwrap();
        let exact = heat_propagate(&u0, 0.3).unwrap();
        assert!(tr.last().sub(&exact).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn sampled_potential_interpolates() {
        let spec = GridSpec::new(1, 16, 1.0).unwrap();
        let pot = Potential::sampled(
            vec![0.0, 1.0],
            vec![Field::constant(spec, 0.0), Field::constant(spec, 2.0)],
        )
        .unwrap();
        assert_eq!(pot.at(0.25)[0], 0.5);
        assert_eq!(pot.at(-1.0)[0], 0.0);
        assert_eq!(pot.at(3.0)[0], 2.0);
        assert!(Potential::sampled(vec![1.0, 0.5], vec![Field::zeros(spec); 2]).is_err());
    }
}

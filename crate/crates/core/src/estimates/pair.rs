use crate::dynamics::{solve_semilinear, sup_norm_bound, NonlinearitySpec, Trajectory};
use crate::error::{invalid, Result};
use crate::grid::Field;

/// Two solutions of the same equation on a shared time grid, their
/// difference `φ = y₁ - y₂`, the common sup bound `M` and `L_M`.
#[derive(Clone, Debug)]
pub struct SolutionPair {
    y1: Trajectory,
    y2: Trajectory,
    phi: Trajectory,
    m: f64,
    l_m: f64,
}

impl SolutionPair {
    pub fn new(y1: Trajectory, y2: Trajectory) -> Result<Self> {
        if y1.fspec() != y2.fspec() {
            return Err(invalid("pair members must share the nonlinearity"));
        }
        let phi = y1.difference(&y2)?;
        let m = sup_norm_bound(&y1).max(sup_norm_bound(&y2));
        let l_m = y1.fspec().lipschitz_on_ball(m);
        Ok(Self { y1, y2, phi, m, l_m })
    }

    /// Solves both members with identical stepping.
    pub fn solve(
        y1_0: &Field,
        y2_0: &Field,
        fspec: NonlinearitySpec,
        t_end: f64,
        dt: f64,
        stride: usize,
    ) -> Result<Self> {
        let y1 = solve_semilinear(y1_0, fspec, t_end, dt, stride)?;
        let y2 = solve_semilinear(y2_0, fspec, t_end, dt, stride)?;
        Self::new(y1, y2)
    }

    pub fn y1(&self) -> &Trajectory {
        &self.y1
    }

    pub fn y2(&self) -> &Trajectory {
        &self.y2
    }

    pub fn phi(&self) -> &Trajectory {
        &self.phi
    }

    /// `M`, the larger of the two sup-norm bounds.
    pub fn sup_bound(&self) -> f64 {
        self.m
    }

    /// `L_M`, the Lipschitz constant of `f` on `[-M, M]`.
    pub fn l_m(&self) -> f64 {
        self.l_m
    }

    pub fn final_time(&self) -> f64 {
        self.phi.final_time()
    }
}

use serde::{Deserialize, Serialize};

use super::pair::SolutionPair;
use crate::dynamics::{solve_semilinear, NonlinearityKind, NonlinearitySpec};
use crate::ensemble::bump;
use crate::error::{Error, Result};
use crate::grid::{Field, Point};
use crate::obsregion::ObservationRegion;
use crate::report::{CheckKind, EstimateReport};
use crate::stats::spearman;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub eps: f64,
    pub omega_mass: f64,
    pub phi_t_l2sq: f64,
    pub phi0_l2sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeTable {
    pub rows: Vec<ProbeRow>,
    /// Spearman correlation of `∫_ω|φ(T)|²` with `∫|φ(T)|²`.
    pub rank_correlation: Option<f64>,
    pub bump_center: Vec<f64>,
    pub bump_radius: f64,
}

impl ProbeTable {
    pub fn report(&self) -> EstimateReport {
        let rho = self.rank_correlation.unwrap_or(f64::NAN);
        EstimateReport::new(CheckKind::UcProbe, rho, rho >= 1.0 - 1e-12)
            .factor("rows", self.rows.len() as f64)
            .meta_f64("bump_radius", self.bump_radius)
    }
}

/// Cube corner closest to the origin and the largest bump radius around it
/// that stays clear of `ω`.
pub fn probe_site(region: &ObservationRegion) -> Result<(Point, f64)> {
    let spec = region.spec();
    let n = spec.dim();
    let x = spec.half_width();
    let l = region.side();
    let mut c = [0.0; 3];
    for v in c.iter_mut().take(n) {
        *v = -x + ((x / l).round()) * l;
    }
    let corner = Point(c);
    let clearance = region
        .centers()
        .iter()
        .map(|p| spec.periodic_dist_sq(&corner, p).sqrt())
        .fold(f64::INFINITY, f64::min)
        - region.radius();
    let radius = 0.9 * clearance;
    if radius < 2.0 * spec.dx() {
        return Err(Error::InvalidGeometry(format!(
            "no room for a probe bump outside the observation set (clearance {clearance})"
        )));
    }
    Ok((corner, radius))
}

/// For each `ε`, solves from `y₀` and `y₀ + ε·bump` with the bump supported
/// away from `ω`, and tabulates the difference integrals.
#[allow(clippy::too_many_arguments)]
pub fn unique_continuation_probe(
    y0: &Field,
    eps_list: &[f64],
    fspec: NonlinearitySpec,
    region: &ObservationRegion,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<ProbeTable> {
    if eps_list.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidParameter("eps list must be sorted descending".into()));
    }
    y0.spec().check_same(region.spec())?;
    let (center, radius) = probe_site(region)?;
    let shape = bump(y0.spec(), &center, radius, 1.0);
    let mut rows = Vec::with_capacity(eps_list.len());
    let linear = fspec.kind == NonlinearityKind::Zero;
    for &eps in eps_list {
        let perturbation = shape.scale(eps);
        // A linear equation carries the difference on its own, which avoids
        // cancellation between two nearly equal solutions.
        let phi = if linear {
            solve_semilinear(&perturbation, fspec, t_end, dt, stride)?
        } else {
            let other = y0.add(&perturbation)?;
            SolutionPair::solve(&other, y0, fspec, t_end, dt, stride)?.phi().clone()
        };
        rows.push(ProbeRow {
            eps,
            omega_mass: phi.last().masked_l2(region.mask())?,
            phi_t_l2sq: phi.last().l2_sq(),
            phi0_l2sq: phi.initial().l2_sq(),
        });
    }
    let om: Vec<f64> = rows.iter().map(|r| r.omega_mass).collect();
    let tot: Vec<f64> = rows.iter().map(|r| r.phi_t_l2sq).collect();
    Ok(ProbeTable {
        rank_correlation: spearman(&om, &tot),
        rows,
        bump_center: center.coords(y0.spec().dim()).to_vec(),
        bump_radius: radius,
    })
}

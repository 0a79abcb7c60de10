use serde::{Deserialize, Serialize};

use super::{smootherstep, smootherstep_d1, smootherstep_d2};
use crate::error::{invalid, Result};
use crate::grid::{Field, GridSpec, Point};

/// Which nested pair of balls a cutoff interpolates between, in units of
/// `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// 1 on `B_{5R/2}`, supported in `B_{3R}`.
    Eta,
    /// 1 on `B_{4R}`, supported in `B_{5R}`.
    Sigma,
    /// 1 on `B_{3R}`, supported in `B_{4R}`.
    SigmaTilde,
}

impl CutoffKind {
    /// Inner and outer radius as multiples of `R`.
    pub fn radii(&self) -> (f64, f64) {
        match self {
            CutoffKind::Eta => (2.5, 3.0),
            CutoffKind::Sigma => (4.0, 5.0),
            CutoffKind::SigmaTilde => (3.0, 4.0),
        }
    }
}

/// Radial cutoff sampled on the lattice together with its analytic gradient
/// and Laplacian.
#[derive(Clone, Debug)]
pub struct CutoffFamily {
    pub center: Point,
    pub big_r: f64,
    pub kind: CutoffKind,
    pub values: Field,
    pub gradient: Vec<Field>,
    pub laplacian: Field,
}

impl CutoffFamily {
    pub fn new(spec: &GridSpec, center: Point, big_r: f64, kind: CutoffKind) -> Result<Self> {
        if !(big_r > 0.0) || !big_r.is_finite() {
            return Err(invalid(format!("cutoff scale R = {big_r} must be positive")));
        }
        let n = spec.dim();
        let (a, b) = kind.radii();
        let (inner, outer) = (a * big_r, b * big_r);
        let width = outer - inner;
        let len = spec.len();
        let mut values = vec![0.0; len];
        let mut grad = vec![vec![0.0; len]; n];
        let mut lap = vec![0.0; len];
        for i in 0..len {
            let p = spec.point(i);
            let delta = spec.periodic_delta(&p, &center);
            let rho = delta[..n].iter().map(|d| d * d).sum::<f64>().sqrt();
            let s = (rho - inner) / width;
            values[i] = 1.0 - smootherstep(s);
            if rho <= inner || rho >= outer {
                continue;
            }
            let d1 = -smootherstep_d1(s) / width;
            let d2 = -smootherstep_d2(s) / (width * width);
            for (axis, g) in grad.iter_mut().enumerate() {
                g[i] = d1 * delta[axis] / rho;
            }
            lap[i] = d2 + (n as f64 - 1.0) / rho * d1;
        }
        Ok(Self {
            center,
            big_r,
            kind,
            values: Field::new(*spec, values)?,
            gradient: grad.into_iter().map(|g| Field::new(*spec, g)).collect::<Result<_>>()?,
            laplacian: Field::new(*spec, lap)?,
        })
    }

    pub fn inner_radius(&self) -> f64 {
        self.kind.radii().0 * self.big_r
    }

    pub fn outer_radius(&self) -> f64 {
        self.kind.radii().1 * self.big_r
    }

    /// Analytic `sup|∇η|`: the profile slope peaks mid-annulus at
    /// `15/(8·width)`.
    pub fn grad_bound(&self) -> f64 {
        15.0 / (8.0 * (self.outer_radius() - self.inner_radius()))
    }

    /// Largest sampled `|∇η|`.
    pub fn sampled_grad_max(&self) -> f64 {
        let len = self.values.spec().len();
        (0..len)
            .map(|i| self.gradient.iter().map(|g| g.values()[i].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

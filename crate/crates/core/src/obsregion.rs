//! Observation sets built from a lattice of cubes `I_j` of side `L`, each
//! holding one ball `B_r(x_j)`. The set `ω` is exactly the union of the
//! balls.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::rng;
use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    Centered,
    /// Centers drawn uniformly so that each ball stays inside its cube.
    Jittered(u64),
}

impl Placement {
    pub fn name(&self) -> &'static str {
        match self {
            Placement::Centered => "centered",
            Placement::Jittered(_) => "jittered",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Placement::Centered => None,
            Placement::Jittered(s) => Some(*s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObservationRegion {
    spec: GridSpec,
    side: f64,
    radius: f64,
    placement: Placement,
    cubes_per_axis: usize,
    cells_per_cube: usize,
    centers: Vec<Point>,
    mask: Field,
    cube_index: Vec<usize>,
}

/// Builds the cube lattice, places one ball per cube, and rasterizes `ω`.
/// A lattice cell belongs to a ball iff its sample point lies strictly
/// inside.
pub fn build_region(spec: &GridSpec, side: f64, radius: f64, placement: Placement) -> Result<ObservationRegion> {
    if !(side > 0.0) || !side.is_finite() {
        return Err(Error::InvalidGeometry(format!("cube side L = {side} must be positive")));
    }
    let cubes = 2.0 * spec.half_width() / side;
    let cubes_per_axis = cubes.round() as usize;
    if cubes_per_axis == 0 || (cubes - cubes_per_axis as f64).abs() > 1e-9 * cubes {
        return Err(Error::InvalidGeometry(format!(
            "L = {side} does not divide the box width {}",
            2.0 * spec.half_width()
        )));
    }
    let cells = side / spec.dx();
    let cells_per_cube = cells.round() as usize;
    if cells_per_cube == 0 || (cells - cells_per_cube as f64).abs() > 1e-9 * cells {
        return Err(Error::InvalidGeometry(format!(
            "L = {side} is not a whole number of lattice cells (dx = {})",
            spec.dx()
        )));
    }
    if !(radius > 0.0) || radius > side / 2.0 {
        return Err(Error::InvalidGeometry(format!("radius r = {radius} must lie in (0, L/2 = {}]", side / 2.0)));
    }
    if radius < 2.0 * spec.dx() {
        return Err(Error::ResolutionTooCoarse { r: radius, dx: spec.dx() });
    }

    let n = spec.dim();
    let x0 = spec.half_width();
    let total = cubes_per_axis.pow(n as u32);
    let mut gen = rng(placement.seed().unwrap_or(0));
    let mut centers = Vec::with_capacity(total);
    for j in 0..total {
        let idx = cube_multi_index(j, cubes_per_axis, n);
        let mut c = [0.0; 3];
        for a in 0..n {
            let lo = -x0 + idx[a] as f64 * side;
            c[a] = match placement {
                Placement::Centered => lo + side / 2.0,
                Placement::Jittered(_) => {
                    let (a_lo, a_hi) = (lo + radius, lo + side - radius);
                    if a_hi > a_lo {
                        gen.gen_range(a_lo..a_hi)
                    } else {
                        a_lo
                    }
                }
            };
        }
        centers.push(Point(c));
    }

    let cube_index: Vec<usize> = (0..spec.len())
        .map(|flat| {
            let mut rest = flat;
            let mut idx = [0usize; 3];
            for a in (0..n).rev() {
                idx[a] = (rest % spec.points_per_axis()) / cells_per_cube;
                rest /= spec.points_per_axis();
            }
            (0..n).fold(0, |acc, a| acc * cubes_per_axis + idx[a])
        })
        .collect();

    let r2 = radius * radius;
    let values = (0..spec.len())
        .map(|flat| {
            let j = cube_index[flat];
            if spec.periodic_dist_sq(&spec.point(flat), &centers[j]) < r2 {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let mask = Field::new(*spec, values)?;
    Ok(ObservationRegion {
        spec: *spec,
        side,
        radius,
        placement,
        cubes_per_axis,
        cells_per_cube,
        centers,
        mask,
        cube_index,
    })
}

fn cube_multi_index(mut j: usize, k: usize, n: usize) -> [usize; 3] {
    let mut idx = [0usize; 3];
    for a in (0..n).rev() {
        idx[a] = j % k;
        j /= k;
    }
    idx
}

impl ObservationRegion {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Cube side `L`.
    pub fn side(&self) -> f64 {
        self.side
    }

    /// Ball radius `r`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `R = √n·L`.
    pub fn big_r(&self) -> f64 {
        (self.spec.dim() as f64).sqrt() * self.side
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn cubes_per_axis(&self) -> usize {
        self.cubes_per_axis
    }

    pub fn cells_per_cube(&self) -> usize {
        self.cells_per_cube
    }

    pub fn num_cubes(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn center(&self, j: usize) -> Result<&Point> {
        self.centers.get(j).ok_or(Error::IndexOutOfRange { index: j, len: self.centers.len() })
    }

    /// Indicator of `ω`.
    pub fn mask(&self) -> &Field {
        &self.mask
    }

    /// Cube index of every lattice cell.
    pub fn cube_index(&self) -> &[usize] {
        &self.cube_index
    }

    /// Indicator of `B_ρ(x_j)` in the minimum-image metric.
    pub fn ball_mask(&self, j: usize, rho: f64) -> Result<Field> {
        let c = *self.center(j)?;
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {rho} must be positive")));
        }
        let r2 = rho * rho;
        let values = (0..self.spec.len())
            .map(|i| if self.spec.periodic_dist_sq(&self.spec.point(i), &c) < r2 { 1.0 } else { 0.0 })
            .collect();
        Field::new(self.spec, values)
    }

    /// Indicator of the cube `I_j`.
    pub fn cube_mask(&self, j: usize) -> Result<Field> {
        self.center(j)?;
        let values = self.cube_index.iter().map(|&c| if c == j { 1.0 } else { 0.0 }).collect();
        Field::new(self.spec, values)
    }

    /// Smallest fraction of a cube covered by `ω`.
    pub fn thickness(&self) -> f64 {
        let mut hit = vec![0usize; self.num_cubes()];
        let mut all = vec![0usize; self.num_cubes()];
        for (&j, &m) in self.cube_index.iter().zip(self.mask.values()) {
            all[j] += 1;
            if m > 0.0 {
                hit[j] += 1;
            }
        }
        hit.iter().zip(&all).map(|(&h, &a)| h as f64 / a as f64).fold(1.0, f64::min)
    }

    /// Largest number of balls `B_ρ(x_j)` covering a single lattice point.
    pub fn overlap_multiplicity(&self, rho: f64) -> usize {
        let r2 = rho * rho;
        (0..self.spec.len())
            .map(|i| {
                let p = self.spec.point(i);
                self.centers.iter().filter(|c| self.spec.periodic_dist_sq(&p, c) < r2).count()
            })
            .max()
            .unwrap_or(0)
    }

    /// Rejects boxes too small to hold `B_{5R}(x_j)` without wrapping.
    pub fn check_embedding(&self) -> Result<()> {
        let need = 5.0 * self.big_r();
        if need > self.spec.half_width() {
            return Err(Error::InvalidGeometry(format!(
                "5R = {need} exceeds the half-width X = {}",
                self.spec.half_width()
            )));
        }
        Ok(())
    }

    pub fn manifest_text(&self) -> String {
        let n = self.spec.dim();
        let mut s = String::new();
        let _ = writeln!(s, "L={:?}", self.side);
        let _ = writeln!(s, "r={:?}", self.radius);
        let _ = writeln!(s, "placement={}", self.placement.name());
        if let Some(seed) = self.placement.seed() {
            let _ = writeln!(s, "seed={seed}");
        }
        let _ = writeln!(s, "cubes={}", self.num_cubes());
        for (j, c) in self.centers.iter().enumerate() {
            let coords: Vec<String> = c.coords(n).iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(s, "center.{j}={}", coords.join(","));
        }
        s
    }
}

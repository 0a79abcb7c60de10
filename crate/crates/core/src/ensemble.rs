//! Seeded initial-data families for experiments and ensembles.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frequency::smootherstep;
use crate::grid::{Field, GridSpec, Point};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `amp·e^{-|x-c|²/(4s)}`, periodic distance.
pub fn gaussian(spec: &GridSpec, center: &Point, s: f64, amp: f64) -> Field {
    let values = (0..spec.len())
        .map(|i| amp * (-spec.periodic_dist_sq(&spec.point(i), center) / (4.0 * s)).exp())
        .collect();
    Field::from_parts(*spec, values, None)
}

/// Compactly supported C² bump: `amp` on `B_{radius/2}(c)`, zero outside
/// `B_radius(c)`, smootherstep in between.
pub fn bump(spec: &GridSpec, center: &Point, radius: f64, amp: f64) -> Field {
    let values = (0..spec.len())
        .map(|i| {
            let d = spec.periodic_dist_sq(&spec.point(i), center).sqrt();
            amp * (1.0 - smootherstep((d - 0.5 * radius) / (0.5 * radius)))
        })
        .collect();
    Field::from_parts(*spec, values, None)
}

/// Scale-invariant profile `(|x|²+ε²)^{-n/(2q)}` under a wide Gaussian
/// envelope `e^{-|x|²/(2W²)}`: extremal data for the `t^{-n/(2q)}` smoothing
/// rate when `q > 1`, for times `ε² ≪ t ≪ W²`.
pub fn power_spike(spec: &GridSpec, q: f64, eps: f64, envelope: f64) -> Result<Field> {
    if !(q > 1.0) {
        return Err(invalid("power spike needs q > 1; use a narrow gaussian for q = 1"));
    }
    let n = spec.dim() as f64;
    Field::from_fn(*spec, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        (r2 + eps * eps).powf(-n / (2.0 * q)) * (-r2 / (2.0 * envelope * envelope)).exp()
    })
}

/// Random trigonometric polynomial with modes `|k_i| ≤ kmax` per axis and
/// amplitudes decaying like `1/(1+|k|)`.
pub fn band_limited(spec: &GridSpec, rng: &mut impl Rng, kmax: usize) -> Field {
    let n = spec.dim();
    let x = spec.half_width();
    let kmax = kmax as i64;
    let mut modes = Vec::new();
    let mut k = [0i64; 3];
    let span = (2 * kmax + 1) as usize;
    for code in 0..span.pow(n as u32) {
        let mut c = code;
        for slot in k.iter_mut().take(n) {
            *slot = (c % span) as i64 - kmax;
            c /= span;
        }
        let norm = k.iter().take(n).map(|v| (v * v) as f64).sum::<f64>().sqrt();
        let amp = rng.gen_range(-1.0..1.0) / (1.0 + norm);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        modes.push((k, amp, phase));
    }
    let values = (0..spec.len())
        .map(|i| {
            let p = spec.point(i);
            modes
                .iter()
                .map(|(k, a, ph)| {
                    let arg: f64 = (0..n)
                        .map(|d| std::f64::consts::PI * k[d] as f64 * p.0[d] / x)
                        .sum();
                    a * (arg + ph).cos()
                })
                .sum()
        })
        .collect();
    Field::from_parts(*spec, values, None)
}

/// How the two initial states of a pair are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitFamily {
    /// A shared Gaussian base plus a Gaussian perturbation in `y₁` only.
    GaussianPerturbation,
    /// Two independent Gaussian sums.
    IndependentGaussians,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEnsemble {
    pub count: usize,
    pub family: InitFamily,
    pub amp_lo: f64,
    pub amp_hi: f64,
    /// Gaussian width parameter `s` in `e^{-|x|²/(4s)}`.
    pub width: f64,
    /// Centers are drawn in `[-spread, spread]ⁿ`.
    pub spread: f64,
    pub seed: u64,
}

impl Default for PairEnsemble {
    fn default() -> Self {
        Self {
            count: 10,
            family: InitFamily::GaussianPerturbation,
            amp_lo: 0.2,
            amp_hi: 1.0,
            width: 0.1,
            spread: 2.0,
            seed: 7,
        }
    }
}

impl PairEnsemble {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(invalid("ensemble count must be positive"));
        }
        if !(self.amp_lo > 0.0 && self.amp_hi >= self.amp_lo) {
            return Err(invalid("amplitude range must satisfy 0 < lo <= hi"));
        }
        if !(self.width > 0.0 && self.spread >= 0.0) {
            return Err(invalid("width must be positive and spread nonnegative"));
        }
        Ok(())
    }

    /// Deterministic list of initial pairs `(y₁⁰, y₂⁰)`.
    pub fn pairs(&self, spec: &GridSpec) -> Result<Vec<(Field, Field)>> {
        self.validate()?;
        let mut rng = rng(self.seed);
        let n = spec.dim();
        let draw_center = |rng: &mut ChaCha8Rng| {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(n) {
                *v = if self.spread > 0.0 { rng.gen_range(-self.spread..=self.spread) } else { 0.0 };
            }
            Point(c)
        };
        let mut out = Vec::with_capacity(self.count);
        for _ in 0..self.count {
            let a0 = rng.gen_range(self.amp_lo..=self.amp_hi);
            let c0 = draw_center(&mut rng);
            let a1 = rng.gen_range(self.amp_lo..=self.amp_hi);
            let c1 = draw_center(&mut rng);
            let pair = match self.family {
                InitFamily::GaussianPerturbation => {
                    let base = gaussian(spec, &c0, self.width * 4.0, a0);
                    let pert = gaussian(spec, &c1, self.width, 0.5 * a1);
                    (base.add(&pert)?, base)
                }
                InitFamily::IndependentGaussians => (
                    gaussian(spec, &c0, self.width, a0),
                    gaussian(spec, &c1, self.width, a1),
                ),
            };
            out.push(pair);
        }
        Ok(out)
    }
}

//! Experiment configuration: a TOML file with `[grid]`, `[dynamics]`,
//! `[region]`, `[ensemble]`, `[checks]` and `[output]` sections. Every key
//! is optional and falls back to the defaults below.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use heatobs::dynamics::{NonlinearityKind, NonlinearitySpec};
use heatobs::ensemble::{InitFamily, PairEnsemble};
use heatobs::obsregion::{build_region, ObservationRegion, Placement};
use heatobs::GridSpec;
use serde::{Deserialize, Serialize};

/// Checks `run` executes when the config does not list any.
pub const DEFAULT_CHECKS: [&str; 10] = [
    "verify-semigroup",
    "solve",
    "pair",
    "frequency",
    "convexity",
    "interpolate",
    "observe",
    "stability",
    "probe-uc",
    "gronwall",
];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub dynamics: DynamicsSection,
    pub region: RegionSection,
    pub ensemble: EnsembleSection,
    pub checks: ChecksSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "X")]
    pub x: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 1, m: 512, x: 16.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub kind: String,
    pub lambda: f64,
    pub p: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub dt: f64,
    pub stride: usize,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        Self { kind: "power_odd".into(), lambda: 1.0, p: 3.0, t_final: 0.5, dt: 0.005, stride: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionSection {
    #[serde(rename = "L")]
    pub side: f64,
    pub r: f64,
    pub placement: String,
    pub seed: u64,
}

impl Default for RegionSection {
    fn default() -> Self {
        Self { side: 1.0, r: 0.25, placement: "centered".into(), seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub count: usize,
    pub family: InitFamily,
    pub amp_lo: f64,
    pub amp_hi: f64,
    pub width: f64,
    pub spread: f64,
    pub seed: u64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        let e = PairEnsemble::default();
        Self {
            count: e.count,
            family: e.family,
            amp_lo: e.amp_lo,
            amp_hi: e.amp_hi,
            width: e.width,
            spread: e.spread,
            seed: e.seed,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSection {
    /// Checks executed by `run`, in order.
    pub run: Vec<String>,
    pub semigroup: SemigroupOpts,
    pub solve: SolveOpts,
    pub frequency: FrequencyOpts,
    pub convexity: ConvexityOpts,
    pub interpolate: InterpolateOpts,
    pub stability: StabilityOpts,
    pub probe: ProbeOpts,
    pub gronwall: GronwallOpts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemigroupOpts {
    pub fields: usize,
    pub kmax: usize,
    pub times: Vec<f64>,
    /// `(p, q)` pairs; `inf` is written as a string.
    pub pairs: Vec<(String, String)>,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SemigroupOpts {
    fn default() -> Self {
        let pairs = [("inf", "1"), ("2", "1"), ("inf", "2"), ("2", "2")];
        Self {
            fields: 100,
            kmax: 6,
            times: vec![0.1, 0.5, 1.0],
            pairs: pairs.iter().map(|(p, q)| (p.to_string(), q.to_string())).collect(),
            tol: heatobs::semigroup::LP_LQ_TOL,
            seed: 11,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOpts {
    /// `gaussian`, `bump`, `spike` or `band_limited`.
    pub init: String,
    pub center: Vec<f64>,
    pub s: f64,
    pub amp: f64,
    pub radius: f64,
    pub eps: f64,
    pub envelope: f64,
    pub kmax: usize,
    pub seed: u64,
    /// Exponent of the smoothing check.
    pub q: f64,
    /// Accepted relative error of the fitted decay slope against `-n/(2q)`;
    /// zero skips the slope verdict.
    pub slope_tol: f64,
    /// Amplitude of a bump potential; zero solves the semilinear equation.
    pub potential_amp: f64,
    pub potential_center: Vec<f64>,
    pub potential_radius: f64,
    pub sigma: f64,
    pub gamma: f64,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self {
            init: "gaussian".into(),
            center: vec![],
            s: 0.05,
            amp: 1.0,
            radius: 1.0,
            eps: 0.0,
            envelope: 2.0,
            kmax: 6,
            seed: 3,
            q: 1.0,
            slope_tol: 0.0,
            potential_amp: 0.0,
            potential_center: vec![],
            potential_radius: 1.0,
            sigma: 1.0,
            gamma: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrequencyOpts {
    pub h: f64,
    /// Cube indices; empty selects the cube holding the origin.
    pub j: Vec<usize>,
    pub window_lo: f64,
}

impl Default for FrequencyOpts {
    fn default() -> Self {
        Self { h: 0.1, j: vec![], window_lo: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvexityOpts {
    /// CSV with columns `t,g`; when absent, weighted-mass traces of the
    /// ensemble differences are used.
    pub samples: Option<String>,
    pub triples: Vec<(f64, f64, f64)>,
    pub h: f64,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub c_tilde: f64,
    pub c_bar: f64,
}

impl Default for ConvexityOpts {
    fn default() -> Self {
        Self { samples: None, triples: vec![], h: 0.1, t_final: None, c_tilde: 0.0, c_bar: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterpolateOpts {
    pub holdout: f64,
    /// β used for the per-cube prefactors.
    pub beta: f64,
}

impl Default for InterpolateOpts {
    fn default() -> Self {
        Self { holdout: 0.2, beta: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilityOpts {
    pub delta: Option<f64>,
    pub holdout: f64,
}

impl Default for StabilityOpts {
    fn default() -> Self {
        Self { delta: None, holdout: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeOpts {
    pub eps: Vec<f64>,
    pub center: Vec<f64>,
    pub s: f64,
    pub amp: f64,
    pub stride: Option<usize>,
}

impl Default for ProbeOpts {
    fn default() -> Self {
        Self { eps: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5], center: vec![0.5], s: 0.2, amp: 1.0, stride: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GronwallOpts {
    pub count: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for GronwallOpts {
    fn default() -> Self {
        Self { count: 50, samples: 20, seed: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    /// Any of `json` and `csv`.
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: "heatobs-out".into(), formats: vec!["json".into(), "csv".into()] }
    }
}

/// Pieces of a config after validation.
pub struct Resolved {
    pub spec: GridSpec,
    pub fspec: NonlinearitySpec,
    pub region: ObservationRegion,
    pub ensemble: PairEnsemble,
}

fn config_err(e: heatobs::Error) -> anyhow::Error {
    anyhow!("ConfigInvalid: {e}")
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| anyhow!("ConfigInvalid: {}: {e}", path.display()))
    }

    pub fn fspec(&self) -> Result<NonlinearitySpec> {
        let d = &self.dynamics;
        let kind = NonlinearityKind::parse(&d.kind).map_err(config_err)?;
        let f = NonlinearitySpec { kind, lambda: d.lambda, p: d.p };
        f.validate().map_err(config_err)?;
        Ok(f)
    }

    pub fn placement(&self) -> Result<Placement> {
        match self.region.placement.as_str() {
            "centered" => Ok(Placement::Centered),
            "jittered" => Ok(Placement::Jittered(self.region.seed)),
            other => bail!("ConfigInvalid: unknown placement {other:?}"),
        }
    }

    pub fn pair_ensemble(&self) -> PairEnsemble {
        let e = &self.ensemble;
        PairEnsemble {
            count: e.count,
            family: e.family,
            amp_lo: e.amp_lo,
            amp_hi: e.amp_hi,
            width: e.width,
            spread: e.spread,
            seed: e.seed,
        }
    }

    /// Checks executed by `run`.
    pub fn run_list(&self) -> Vec<String> {
        if self.checks.run.is_empty() {
            DEFAULT_CHECKS.iter().map(|s| s.to_string()).collect()
        } else {
            self.checks.run.iter().map(|s| s.replace('_', "-")).collect()
        }
    }

    /// Validates every section against the library preconditions.
    pub fn resolve(&self) -> Result<Resolved> {
        let spec = GridSpec::new(self.grid.n, self.grid.m, self.grid.x).map_err(config_err)?;
        let fspec = self.fspec()?;
        let d = &self.dynamics;
        if !(d.t_final > 0.0 && d.dt > 0.0 && d.dt <= d.t_final) || d.stride == 0 {
            bail!("ConfigInvalid: InvalidParameter: need 0 < dt <= T and stride >= 1");
        }
        let region = build_region(&spec, self.region.side, self.region.r, self.placement()?).map_err(config_err)?;
        let ensemble = self.pair_ensemble();
        ensemble.validate().map_err(config_err)?;
        for name in self.run_list() {
            if !DEFAULT_CHECKS.contains(&name.as_str()) {
                bail!("ConfigInvalid: unknown check {name:?}");
            }
        }
        for f in &self.output.formats {
            if f != "json" && f != "csv" {
                bail!("ConfigInvalid: unknown output format {f:?}");
            }
        }
        let c = &self.checks;
        if c.semigroup.times.iter().any(|t| !(*t > 0.0)) || c.semigroup.tol < 0.0 {
            bail!("ConfigInvalid: InvalidParameter: semigroup times must be positive and tol nonnegative");
        }
        for (p, q) in &c.semigroup.pairs {
            parse_exponent(p)?;
            parse_exponent(q)?;
        }
        if !(c.frequency.h > 0.0) || !(c.convexity.h > 0.0) {
            bail!("ConfigInvalid: InvalidParameter: weight offset h must be positive");
        }
        for &j in &c.frequency.j {
            region.center(j).map_err(config_err)?;
        }
        for frac in [c.interpolate.holdout, c.stability.holdout] {
            if !(0.0..1.0).contains(&frac) {
                bail!("ConfigInvalid: InvalidParameter: holdout fraction {frac} must lie in [0, 1)");
            }
        }
        if !(c.interpolate.beta > 0.0 && c.interpolate.beta < 1.0) {
            bail!("ConfigInvalid: InvalidParameter: beta must lie in (0, 1)");
        }
        if c.probe.eps.is_empty() || c.probe.eps.windows(2).any(|w| w[1] > w[0]) {
            bail!("ConfigInvalid: InvalidParameter: probe eps list must be nonempty and descending");
        }
        Ok(Resolved { spec, fspec, region, ensemble })
    }
}

pub fn parse_exponent(s: &str) -> Result<heatobs::Exponent> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(heatobs::Exponent::Infinity);
    }
    let p: f64 = s.parse().map_err(|_| anyhow!("ConfigInvalid: bad exponent {s:?}"))?;
    if !(p >= 1.0) {
        bail!("ConfigInvalid: InvalidParameter: exponent {p} must be >= 1");
    }
    Ok(heatobs::Exponent::Finite(p))
}

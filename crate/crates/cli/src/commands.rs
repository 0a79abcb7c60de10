use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use heatobs::dynamics::{
    potential_smoothing_check, smoothing_check, solve_linear_potential, solve_semilinear, Potential,
};
use heatobs::ensemble::{band_limited, bump, gaussian, power_spike, rng};
use heatobs::estimates::{
    backward_bound_check, chi_bound_check, chi_trace, conditional_stability_check, conditional_stability_triple,
    global_interpolation_check, gronwall_superlinear_check, interpolation_report, local_energy_check,
    local_interpolation_check, observation_estimate_check, unique_continuation_probe, SolutionPair,
};
use heatobs::frequency::{
    frequency_derivative_check, frequency_trace, log_convexity_check, logcon_constants, variational_identity_check,
    CutoffFamily, CutoffKind, FrequencyTrace, SampledFunction,
};
use heatobs::semigroup::lp_lq_check_with_tol;
use heatobs::{EstimateReport, Field, GridSpec, Point};
use rand::Rng;
use rayon::prelude::*;

use crate::config::{parse_exponent, ExperimentConfig, Resolved};
use crate::output::{csv_text, num, Sink, REPORTS_FILE};

/// Everything a check needs besides its own arguments.
pub struct Ctx<'a> {
    pub config: &'a ExperimentConfig,
    pub res: &'a Resolved,
    pub root: PathBuf,
    pub tol_scale: f64,
}

/// Reports produced by one check plus a one-line summary.
pub struct Outcome {
    pub reports: Vec<EstimateReport>,
    pub summary: String,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

/// Parameters of a single Gronwall configuration given on the command line.
#[derive(Clone, Copy, Debug)]
pub struct GronwallArgs {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub g0: f64,
    pub t: f64,
}

impl Ctx<'_> {
    fn sink(&self, name: &str) -> Result<Sink> {
        Sink::new(&self.root, name, &self.config.output.formats)
    }

    fn point(&self, coords: &[f64]) -> Result<Point> {
        let n = self.res.spec.dim();
        match coords.len() {
            0 => Ok(Point::origin()),
            k if k == n => Ok(Point::new(coords)),
            k => bail!("InvalidParameter: point has {k} coordinates, grid has {n}"),
        }
    }

    fn solve_pairs(&self) -> Result<Vec<SolutionPair>> {
        let d = &self.config.dynamics;
        let fspec = self.res.fspec;
        self.res
            .ensemble
            .pairs(&self.res.spec)?
            .into_par_iter()
            .enumerate()
            .map(|(i, (a, b))| {
                SolutionPair::solve(&a, &b, fspec, d.t_final, d.dt, d.stride).with_context(|| format!("pair {i}"))
            })
            .collect()
    }

    fn cubes(&self) -> Vec<usize> {
        let js = &self.config.checks.frequency.j;
        if !js.is_empty() {
            return js.clone();
        }
        let spec = &self.res.spec;
        let origin = (0..spec.len())
            .min_by(|&a, &b| {
                let da = spec.periodic_dist_sq(&spec.point(a), &Point::origin());
                let db = spec.periodic_dist_sq(&spec.point(b), &Point::origin());
                da.total_cmp(&db)
            })
            .unwrap_or(0);
        vec![self.res.region.cube_index()[origin]]
    }

    fn cutoff(&self, j: usize) -> Result<CutoffFamily> {
        let region = &self.res.region;
        Ok(CutoffFamily::new(&self.res.spec, *region.center(j)?, region.big_r(), CutoffKind::Eta)?)
    }

    fn trace(&self, pair: &SolutionPair, j: usize) -> Result<(CutoffFamily, FrequencyTrace)> {
        let opts = &self.config.checks.frequency;
        let cutoff = self.cutoff(j)?;
        let window = (opts.window_lo, pair.final_time());
        let trace = frequency_trace(pair.phi(), &cutoff, j, opts.h, window)?;
        Ok((cutoff, trace))
    }
}

fn tag(r: EstimateReport, pair: usize) -> EstimateReport {
    r.meta("pair", pair as u64)
}

fn finish(sink: &Sink, ctx: &Ctx, command: &str, reports: Vec<EstimateReport>, summary: String) -> Result<Outcome> {
    sink.reports(&reports)?;
    sink.manifest(command, ctx.config, &[])?;
    Ok(Outcome { reports, summary })
}

pub fn verify_semigroup(ctx: &Ctx) -> Result<Outcome> {
    let opts = &ctx.config.checks.semigroup;
    let sink = ctx.sink("verify-semigroup")?;
    let mut r = rng(opts.seed);
    let fields: Vec<Field> = (0..opts.fields).map(|_| band_limited(&ctx.res.spec, &mut r, opts.kmax)).collect();
    let pairs = opts
        .pairs
        .iter()
        .map(|(p, q)| Ok((parse_exponent(p)?, parse_exponent(q)?)))
        .collect::<Result<Vec<_>>>()?;
    let tol = opts.tol * ctx.tol_scale;
    let per_field: Vec<Vec<EstimateReport>> = fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let mut out = Vec::new();
            for &(p, q) in &pairs {
                for &t in &opts.times {
                    out.push(lp_lq_check_with_tol(f, t, q, p, tol)?.meta("field", i as u64));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let passed = per_field.iter().filter(|v| v.iter().all(|r| r.pass)).count();
    let reports: Vec<EstimateReport> = per_field.into_iter().flatten().collect();
    let rows = reports.iter().map(|r| {
        vec![
            r.meta["field"].to_string(),
            r.meta["p"].to_string(),
            r.meta["q"].to_string(),
            r.meta["t"].to_string(),
            num(r.lhs),
            num(r.rhs_factors["rhs"]),
            r.pass.to_string(),
        ]
    });
    sink.csv("lp_lq.csv", &csv_text(&["field", "p", "q", "t", "lhs", "rhs", "pass"], rows)?)?;
    let summary = format!("{passed}/{} pass", opts.fields);
    finish(&sink, ctx, "verify-semigroup", reports, summary)
}

fn initial_field(ctx: &Ctx) -> Result<Field> {
    let o = &ctx.config.checks.solve;
    let spec: &GridSpec = &ctx.res.spec;
    let c = ctx.point(&o.center)?;
    Ok(match o.init.as_str() {
        "gaussian" => gaussian(spec, &c, o.s, o.amp),
        "bump" => bump(spec, &c, o.radius, o.amp),
        "spike" => {
            let eps = if o.eps > 0.0 { o.eps } else { spec.dx() / 8.0 };
            power_spike(spec, o.q, eps, o.envelope)?.scale(o.amp)
        }
        "band_limited" => band_limited(spec, &mut rng(o.seed), o.kmax),
        other => bail!("InvalidParameter: unknown initial data {other:?}"),
    })
}

pub fn solve(ctx: &Ctx) -> Result<Outcome> {
    let o = &ctx.config.checks.solve;
    let d = &ctx.config.dynamics;
    let sink = ctx.sink("solve")?;
    let y0 = initial_field(ctx)?;
    let n = ctx.res.spec.dim() as f64;
    let (traj, report, expo) = if o.potential_amp != 0.0 {
        let center = ctx.point(&o.potential_center)?;
        let pot = Potential::Static(bump(&ctx.res.spec, &center, o.potential_radius, o.potential_amp));
        let traj = solve_linear_potential(&y0, &pot, d.t_final, d.dt, d.stride)?;
        let rep = potential_smoothing_check(&traj, &pot, o.sigma, o.gamma)?;
        (traj, rep, n / (2.0 * o.gamma))
    } else {
        let traj = solve_semilinear(&y0, ctx.res.fspec, d.t_final, d.dt, d.stride)?;
        let rep = smoothing_check(&traj, o.q)?;
        (traj, rep, n / (2.0 * o.q))
    };
    let mut report = report;
    if o.slope_tol > 0.0 {
        let slope = report.rhs_factors["decay_slope"];
        let ok = (slope + expo).abs() <= o.slope_tol * ctx.tol_scale * expo;
        report = report.factor("slope_target", -expo).meta("slope_ok", ok);
        report.pass &= ok;
    }
    traj.save(&sink.dir().join("trajectory"))?;
    let rows = traj.times().iter().zip(traj.fields()).map(|(t, f)| vec![num(*t), num(f.max_abs()), num(f.l2_sq())]);
    sink.csv("norms.csv", &csv_text(&["t", "sup", "l2sq"], rows)?)?;
    let summary = format!("{} snapshots, smoothing constant {:.6}", traj.len(), report.lhs);
    finish(&sink, ctx, "solve", vec![report], summary)
}

pub fn pair(ctx: &Ctx) -> Result<Outcome> {
    let sink = ctx.sink("pair")?;
    let pairs = ctx.solve_pairs()?;
    let rows = pairs.iter().enumerate().map(|(i, p)| {
        vec![
            i.to_string(),
            num(p.sup_bound()),
            num(p.l_m()),
            num(p.phi().initial().l2_sq()),
            num(p.phi().last().l2_sq()),
        ]
    });
    sink.csv("pairs.csv", &csv_text(&["pair", "sup_bound", "L_M", "phi0_l2sq", "phiT_l2sq"], rows)?)?;
    if let Some(first) = pairs.first() {
        first.y1().save(&sink.dir().join("y1"))?;
        first.y2().save(&sink.dir().join("y2"))?;
    }
    let summary = format!("{} pairs solved", pairs.len());
    finish(&sink, ctx, "pair", vec![], summary)
}

type PairOutput = (Vec<EstimateReport>, Vec<(String, String)>);

pub fn frequency(ctx: &Ctx) -> Result<Outcome> {
    let sink = ctx.sink("frequency")?;
    let pairs = ctx.solve_pairs()?;
    let js = ctx.cubes();
    let h = ctx.config.checks.frequency.h;
    let results: Vec<PairOutput> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut reports = Vec::new();
            let mut traces = Vec::new();
            for &j in &js {
                let (cutoff, trace) = ctx.trace(p, j).with_context(|| format!("pair {i}, cube {j}"))?;
                let mid = trace.times[trace.len() / 2];
                let identity = variational_identity_check(p.phi(), &cutoff, h, p.final_time(), mid)?;
                reports.push(tag(identity, i));
                let deriv = frequency_derivative_check(&trace, p.y1(), p.y2(), &cutoff, p.l_m())?;
                reports.push(tag(deriv, i));
                traces.push((format!("trace_p{i:03}_j{j}.csv"), trace.to_csv()?));
            }
            Ok((reports, traces))
        })
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for (r, traces) in results {
        reports.extend(r);
        for (name, text) in traces {
            sink.csv(&name, &text)?;
        }
    }
    let failed = reports.iter().filter(|r| !r.pass).count();
    let summary = format!("{} pairs x {} cubes, {failed} failed checks", pairs.len(), js.len());
    finish(&sink, ctx, "frequency", reports, summary)
}

/// Triples spread over `[lo, hi]` at fixed fractions.
fn default_triples(lo: f64, hi: f64) -> Vec<(f64, f64, f64)> {
    let at = |f: f64| lo + f * (hi - lo);
    [(0.0, 0.4, 0.8), (0.1, 0.5, 0.9), (0.2, 0.6, 1.0), (0.0, 0.5, 1.0), (0.3, 0.45, 0.7)]
        .iter()
        .map(|&(a, b, c)| (at(a), at(b), at(c)))
        .collect()
}

fn read_samples(path: &Path) -> Result<(SampledFunction, Vec<u8>)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading samples {}", path.display()))?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| anyhow!("samples file lacks a {name:?} column"))
    };
    let (ti, gi) = (col("t")?, col("g")?);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        times.push(rec[ti].trim().parse::<f64>()?);
        values.push(rec[gi].trim().parse::<f64>()?);
    }
    Ok((SampledFunction::new(times, values)?, bytes))
}

pub fn convexity(ctx: &Ctx, samples: Option<&Path>) -> Result<Outcome> {
    let o = &ctx.config.checks.convexity;
    let sink = ctx.sink("convexity")?;
    let samples = samples.map(Path::to_path_buf).or_else(|| o.samples.as_ref().map(PathBuf::from));
    let mut reports = Vec::new();
    if let Some(path) = samples {
        let (g, bytes) = read_samples(&path)?;
        let (lo, hi) = (g.times()[0], *g.times().last().unwrap());
        let t_final = o.t_final.unwrap_or(hi);
        let triples = if o.triples.is_empty() { default_triples(lo, hi.min(t_final)) } else { o.triples.clone() };
        for (t1, t2, t3) in triples {
            reports.push(log_convexity_check(&g, t1, t2, t3, o.h, t_final, o.c_tilde, o.c_bar)?);
        }
        sink.reports(&reports)?;
        sink.manifest("convexity", ctx.config, &[&bytes])?;
        let failed = reports.iter().filter(|r| !r.pass).count();
        let summary = format!("{} triples from {}, {failed} failed", reports.len(), path.display());
        return Ok(Outcome { reports, summary });
    }
    let pairs = ctx.solve_pairs()?;
    let j = ctx.cubes()[0];
    let per_pair: Vec<Vec<EstimateReport>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let (_, trace) = ctx.trace(p, j).with_context(|| format!("pair {i}"))?;
            let (c_tilde, c_bar) = logcon_constants(&trace)?;
            let g = SampledFunction::new(trace.times.clone(), trace.den.clone())?;
            let lo = trace.times[0];
            let hi = *trace.times.last().unwrap();
            let triples = if o.triples.is_empty() { default_triples(lo, hi) } else { o.triples.clone() };
            triples
                .into_iter()
                .map(|(t1, t2, t3)| {
                    Ok(tag(log_convexity_check(&g, t1, t2, t3, trace.h, trace.t_final, c_tilde, c_bar)?, i))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    reports.extend(per_pair.into_iter().flatten());
    let failed = reports.iter().filter(|r| !r.pass).count();
    let summary = format!("{} triples over {} pairs, {failed} failed", reports.len(), pairs.len());
    finish(&sink, ctx, "convexity", reports, summary)
}

pub fn interpolate(ctx: &Ctx) -> Result<Outcome> {
    let o = &ctx.config.checks.interpolate;
    let sink = ctx.sink("interpolate")?;
    let region = &ctx.res.region;
    let pairs = ctx.solve_pairs()?;
    let triples = pairs.iter().map(|p| global_interpolation_check(p, region)).collect::<heatobs::Result<Vec<_>>>()?;
    let rows = triples.iter().enumerate().map(|(i, t)| vec![i.to_string(), num(t.lhs), num(t.a), num(t.b)]);
    sink.csv("triples.csv", &csv_text(&["pair", "lhs", "a", "b"], rows)?)?;
    let global = interpolation_report(&triples, o.holdout)?;
    let fitted = global.fitted.expect("interpolation report carries a fit");
    let mut reports = vec![global];
    if region.check_embedding().is_ok() {
        let t_final = ctx.config.dynamics.t_final;
        for (i, p) in pairs.iter().enumerate() {
            for &j in &ctx.cubes() {
                reports.push(tag(local_energy_check(p, region, j, t_final)?, i));
                reports.push(tag(local_interpolation_check(p, region, j, o.beta)?, i));
            }
        }
    } else {
        log::warn!("box too small for the local energy balls; skipping per-cube checks");
    }
    let summary = format!("beta = {:.2}, C = {:.6} over {} pairs", fitted.beta, fitted.c, pairs.len());
    finish(&sink, ctx, "interpolate", reports, summary)
}

pub fn observe(ctx: &Ctx) -> Result<Outcome> {
    let sink = ctx.sink("observe")?;
    let region = &ctx.res.region;
    let pairs = ctx.solve_pairs()?;
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut chi_rows = Vec::new();
    let mut worst = 0.0f64;
    for (i, p) in pairs.iter().enumerate() {
        let obs = observation_estimate_check(p, region).with_context(|| format!("pair {i}"))?;
        let c = obs.rhs_factors["C_req"];
        worst = worst.max(c);
        rows.push(vec![i.to_string(), num(c), num(obs.rhs_factors["chi0"]), num(obs.lhs)]);
        reports.push(tag(obs, i));
        reports.push(tag(chi_bound_check(p)?, i));
        reports.push(tag(backward_bound_check(p)?, i));
        let trace = chi_trace(p);
        for (t, chi) in trace.times.iter().zip(&trace.chi) {
            chi_rows.push(vec![i.to_string(), num(*t), num(*chi)]);
        }
    }
    sink.csv("observation.csv", &csv_text(&["pair", "C_req", "chi0", "phi0_l2sq"], rows)?)?;
    sink.csv("chi.csv", &csv_text(&["pair", "t", "chi"], chi_rows)?)?;
    let summary = format!("largest required constant {worst:.6} over {} pairs", pairs.len());
    finish(&sink, ctx, "observe", reports, summary)
}

pub fn stability(ctx: &Ctx) -> Result<Outcome> {
    let o = &ctx.config.checks.stability;
    let sink = ctx.sink("stability")?;
    let pairs = ctx.solve_pairs()?;
    let triples = pairs
        .iter()
        .map(|p| conditional_stability_triple(p, &ctx.res.region, o.delta))
        .collect::<heatobs::Result<Vec<_>>>()?;
    let rows = triples
        .iter()
        .enumerate()
        .map(|(i, t)| vec![i.to_string(), num(t.lhs), num(t.a_delta), num(t.a_class), num(t.b)]);
    sink.csv("triples.csv", &csv_text(&["pair", "lhs", "a_delta", "a_class", "b"], rows)?)?;
    let report = conditional_stability_check(&triples, o.holdout)?;
    let fitted = report.fitted.expect("stability report carries a fit");
    let summary = format!("beta = {:.2}, C = {:.6}", fitted.beta, fitted.c);
    finish(&sink, ctx, "stability", vec![report], summary)
}

pub fn probe_uc(ctx: &Ctx) -> Result<Outcome> {
    let o = &ctx.config.checks.probe;
    let d = &ctx.config.dynamics;
    let sink = ctx.sink("probe-uc")?;
    let y0 = gaussian(&ctx.res.spec, &ctx.point(&o.center)?, o.s, o.amp);
    let stride = o.stride.unwrap_or(d.stride);
    let table = unique_continuation_probe(&y0, &o.eps, ctx.res.fspec, &ctx.res.region, d.t_final, d.dt, stride)?;
    let rows = table
        .rows
        .iter()
        .map(|r| vec![num(r.eps), num(r.omega_mass), num(r.phi_t_l2sq), num(r.phi0_l2sq)]);
    sink.csv("probe.csv", &csv_text(&["eps", "omega_mass", "phiT_l2sq", "phi0_l2sq"], rows)?)?;
    sink.json("probe.json", &table)?;
    let report = table.report();
    let summary = format!("rank correlation {:.6} over {} amplitudes", report.lhs, table.rows.len());
    finish(&sink, ctx, "probe-uc", vec![report], summary)
}

pub fn gronwall(ctx: &Ctx, single: Option<GronwallArgs>) -> Result<Outcome> {
    let o = &ctx.config.checks.gronwall;
    let sink = ctx.sink("gronwall")?;
    let configs = match single {
        Some(g) => vec![g],
        None => {
            let mut r = rng(o.seed);
            (0..o.count)
                .map(|_| GronwallArgs {
                    a: r.gen_range(0.1..5.0),
                    b: r.gen_range(0.0..3.0),
                    alpha: r.gen_range(0.2..3.0),
                    g0: r.gen_range(0.0..20.0),
                    t: r.gen_range(0.1..2.0),
                })
                .collect()
        }
    };
    let reports = configs
        .par_iter()
        .map(|g| Ok(gronwall_superlinear_check(g.a, g.b, g.alpha, g.g0, g.t, o.samples)?))
        .collect::<Result<Vec<_>>>()?;
    let rows = configs.iter().zip(&reports).map(|(g, r)| {
        vec![
            num(g.a),
            num(g.b),
            num(g.alpha),
            num(g.g0),
            num(g.t),
            num(r.rhs_factors["value_at_T"]),
            num(r.rhs_factors["bound_at_T"]),
            num(r.lhs),
            r.pass.to_string(),
        ]
    });
    let header = ["A", "B", "alpha", "g0", "T", "value_at_T", "bound_at_T", "worst_ratio", "pass"];
    sink.csv("gronwall.csv", &csv_text(&header, rows)?)?;
    let summary = match single {
        Some(g) => format!(
            "bound {:.6} vs value {:.6} at t={}",
            reports[0].rhs_factors["bound_at_T"], reports[0].rhs_factors["value_at_T"], g.t
        ),
        None => format!("{}/{} configurations within the bound", reports.iter().filter(|r| r.pass).count(), reports.len()),
    };
    finish(&sink, ctx, "gronwall", reports, summary)
}

fn collect_reports(dir: &Path, found: &mut Vec<(PathBuf, Vec<EstimateReport>)>) -> Result<()> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_reports(&path, found)?;
        } else if path.file_name().is_some_and(|n| n == REPORTS_FILE) {
            let text = std::fs::read_to_string(&path)?;
            let reports: Vec<EstimateReport> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            found.push((path, reports));
        }
    }
    Ok(())
}

/// Merges every report file under `dir` into `summary.csv` and
/// `summary.json` there.
pub fn report(dir: &Path, formats: &[String]) -> Result<Outcome> {
    let mut found = Vec::new();
    if dir.is_dir() {
        collect_reports(dir, &mut found)?;
    }
    if found.is_empty() {
        bail!("NoReports: no {REPORTS_FILE} under {}", dir.display());
    }
    let mut rows = Vec::new();
    let mut table = Vec::new();
    let mut all = Vec::new();
    for (path, reports) in found {
        let source = path
            .parent()
            .and_then(|p| p.strip_prefix(dir).ok())
            .map(|p| p.display().to_string())
            .unwrap_or_default();
        let mut kinds: Vec<_> = reports.iter().map(|r| r.kind).collect();
        kinds.sort();
        kinds.dedup();
        for kind in kinds {
            let of_kind: Vec<&EstimateReport> = reports.iter().filter(|r| r.kind == kind).collect();
            let passed = of_kind.iter().filter(|r| r.pass).count();
            let worst = of_kind.iter().map(|r| r.lhs).fold(f64::NEG_INFINITY, f64::max);
            rows.push(vec![source.clone(), kind.tag().to_string(), of_kind.len().to_string(), passed.to_string(), num(worst)]);
            table.push(serde_json::json!({
                "source": source,
                "kind": kind,
                "total": of_kind.len(),
                "passed": passed,
                "max_lhs": worst,
            }));
        }
        all.extend(reports);
    }
    let text = csv_text(&["source", "kind", "total", "passed", "max_lhs"], rows)?;
    let sink = Sink::at(dir.to_path_buf(), formats)?;
    sink.csv("summary.csv", &text)?;
    sink.json("summary.json", &table)?;
    print!("{text}");
    let passed = all.iter().filter(|r| r.pass).count();
    let summary = format!("{passed}/{} reports pass", all.len());
    Ok(Outcome { reports: all, summary })
}

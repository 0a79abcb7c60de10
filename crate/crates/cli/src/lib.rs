//! Command-line runner for the heatobs checks. Every check reads an
//! [`ExperimentConfig`], writes its reports and tables below the output
//! directory, and maps the verdict to an exit code: 0 when all checks pass,
//! 2 when one fails, 1 when a check could not run.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::{Ctx, GronwallArgs, Outcome};
pub use crate::config::ExperimentConfig;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

/// Overrides `--out` when set.
pub const OUT_ENV: &str = "HEATOBS_OUT";

#[derive(Debug, Parser)]
#[command(name = "heatobs", version, about = "Spectral heat-equation simulator and estimate checker")]
pub struct Cli {
    /// TOML experiment config; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (0 picks one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Replaces every seed in the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output root; HEATOBS_OUT takes precedence.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Multiplies the runner-side tolerances.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol_scale: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the checks listed in the config.
    Run,
    /// Lp-Lq smoothing bounds on seeded band-limited fields.
    VerifySemigroup,
    /// Evolve one initial datum and check its sup-norm decay.
    Solve,
    /// Solve the seeded pair ensemble.
    Pair,
    /// Frequency function identity and derivative checks.
    Frequency,
    /// Three-point logarithmic convexity test.
    Convexity {
        /// CSV with columns `t,g`.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Fit and verify the interpolation estimate.
    Interpolate,
    /// Observation estimate and chi bounds.
    Observe,
    /// Conditional stability on held-out pairs.
    Stability,
    /// Observation size against shrinking initial data.
    ProbeUc,
    /// Superlinear Gronwall bound, one case or a seeded sweep.
    Gronwall {
        #[arg(long = "A", requires_all = ["b", "alpha", "g0", "t"])]
        a: Option<f64>,
        #[arg(long = "B")]
        b: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        g0: Option<f64>,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Merge every report file under a directory into one summary table.
    Report { dir: Option<PathBuf> },
}

fn out_dir(cli: &Cli, config: &ExperimentConfig) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(dir);
    }
    cli.out.clone().unwrap_or_else(|| PathBuf::from(&config.output.dir))
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.ensemble.seed = seed;
        config.region.seed = seed;
        config.checks.semigroup.seed = seed;
        config.checks.solve.seed = seed;
        config.checks.gronwall.seed = seed;
    }
    Ok(config)
}

fn run_check(name: &str, ctx: &Ctx, command: &Command) -> Result<Outcome> {
    match name {
        "verify-semigroup" => commands::verify_semigroup(ctx),
        "solve" => commands::solve(ctx),
        "pair" => commands::pair(ctx),
        "frequency" => commands::frequency(ctx),
        "convexity" => {
            let samples = match command {
                Command::Convexity { samples } => samples.as_deref(),
                _ => None,
            };
            commands::convexity(ctx, samples)
        }
        "interpolate" => commands::interpolate(ctx),
        "observe" => commands::observe(ctx),
        "stability" => commands::stability(ctx),
        "probe-uc" => commands::probe_uc(ctx),
        "gronwall" => {
            let single = match command {
                Command::Gronwall { a: Some(a), b: Some(b), alpha: Some(alpha), g0: Some(g0), t: Some(t) } => {
                    Some(GronwallArgs { a: *a, b: *b, alpha: *alpha, g0: *g0, t: *t })
                }
                _ => None,
            };
            commands::gronwall(ctx, single)
        }
        other => anyhow::bail!("ConfigInvalid: unknown check {other:?}"),
    }
}

fn verdict(outcome: &Outcome) -> &'static str {
    if outcome.pass() {
        "PASS"
    } else {
        "FAIL"
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let config = load_config(cli)?;
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        anyhow::bail!("ConfigInvalid: --tol-scale must be positive");
    }
    let root = out_dir(cli, &config);
    if let Command::Report { dir } = &cli.command {
        let dir = dir.clone().unwrap_or(root);
        let outcome = commands::report(Path::new(&dir), &config.output.formats)?;
        println!("report: {} ({})", verdict(&outcome), outcome.summary);
        return Ok(if outcome.pass() { EXIT_PASS } else { EXIT_FAIL });
    }
    let res = config.resolve()?;
    let ctx = Ctx { config: &config, res: &res, root, tol_scale: cli.tol_scale };
    let names: Vec<String> = match &cli.command {
        Command::Run => config.run_list(),
        Command::VerifySemigroup => vec!["verify-semigroup".into()],
        Command::Solve => vec!["solve".into()],
        Command::Pair => vec!["pair".into()],
        Command::Frequency => vec!["frequency".into()],
        Command::Convexity { .. } => vec!["convexity".into()],
        Command::Interpolate => vec!["interpolate".into()],
        Command::Observe => vec!["observe".into()],
        Command::Stability => vec!["stability".into()],
        Command::ProbeUc => vec!["probe-uc".into()],
        Command::Gronwall { .. } => vec!["gronwall".into()],
        Command::Report { .. } => unreachable!(),
    };
    let mut all_pass = true;
    for name in &names {
        let outcome = run_check(name, &ctx, &cli.command).map_err(|e| e.context(format!("check {name}")))?;
        println!("{name}: {} ({})", verdict(&outcome), outcome.summary);
        all_pass &= outcome.pass();
    }
    Ok(if all_pass { EXIT_PASS } else { EXIT_FAIL })
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

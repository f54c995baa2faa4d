//! The `flockscale` command line.
//!
//! Settings resolve in three layers: scenario defaults, then a `key = value`
//! config file (`--config`), then flags (`--set KEY=VALUE` and the dedicated
//! flags, which win). Every run writes `manifest.txt` holding the resolved
//! settings in the config file format.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::harness::compare::{run_comparison_batch, write_comparison_csv, CompareOptions, ComparisonRow};
use crate::harness::metrics::pattern_metrics;
use crate::harness::scenario::{build_scenario, Scenario, ScenarioName};
use crate::harness::snapshot::SnapshotSeries;
use crate::hydro::{run_macro, MomentumMode, SolverConfig};
use crate::micro::{run_micro, LeadershipRule, MicroConfig};
use crate::model::config::apply_params;
use crate::model::{KeyValues, ModelError, PARAM_KEYS};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SWARM_OUT";
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const COMPARISON_FILE: &str = "comparison.csv";

const RUN_KEYS: [&str; 15] = [
    "scenario",
    "mode",
    "out",
    "seed",
    "N",
    "rule",
    "momentum",
    "dt",
    "T",
    "dx",
    "linear_tol",
    "max_iterations",
    "snapshots",
    "rho_bc",
    "l_bc",
];

const BC_VELOCITY_KEYS: [&str; 2] = ["u1_bc", "u2_bc"];

const COMPARE_KEYS: [&str; 9] = ["R", "eps", "N", "seed", "seeds", "T", "rule", "momentum", "out"];

#[derive(Debug, Parser)]
#[command(name = "flockscale", version, about = "Multiscale swarming simulator with leader-follower transitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario with the particle or the continuum model.
    Run(RunArgs),
    /// Compare particle and continuum solutions of the 1D test.
    #[command(name = "compare1d")]
    Compare1d(CompareArgs),
    /// Print pattern metrics for every snapshot in a directory.
    Metrics(MetricsArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// test1d, test2da, test2db, test2db_lbc1, test2dc or custom.
    #[arg(long)]
    scenario: Option<String>,
    /// micro or macro.
    #[arg(long)]
    mode: Option<String>,
    /// Output directory; defaults to $SWARM_OUT.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Particle count.
    #[arg(long = "N")]
    particles: Option<String>,
    /// `key = value` file with any run key.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override any run key or model parameter.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Comma-separated interaction radii.
    #[arg(long = "R")]
    radius: Option<String>,
    /// Comma-separated scaling parameters.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "N")]
    particles: Option<String>,
    /// First seed; `seeds` consecutive seeds are used.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Directory holding `snap_<step>.csv` files.
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(m) => write!(f, "error: {m}"),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn runtime(err: impl std::fmt::Display) -> CliError {
    CliError::Runtime(err.to_string())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => run_command(a),
        Command::Compare1d(a) => compare_command(a),
        Command::Metrics(a) => metrics_command(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.code()
        }
    }
}

/// Config file, then `--set` pairs, then dedicated flags.
fn layered(
    config: Option<&Path>,
    set: &[String],
    flags: &[(&str, &Option<String>)],
    allowed: &[&str],
) -> Result<KeyValues, CliError> {
    let mut kv = match config {
        Some(path) => {
            KeyValues::read(path).map_err(|e| usage(format!("--config {}: {e}", path.display())))?
        }
        None => KeyValues::default(),
    };
    kv.reject_unknown(allowed)
        .map_err(|e| usage(format!("--config: {e}")))?;
    for pair in set {
        let Some((k, v)) = pair.split_once('=') else {
            return Err(usage(format!("--set expects KEY=VALUE, got `{pair}`")));
        };
        let (k, v) = (k.trim(), v.trim());
        if !allowed.contains(&k) {
            return Err(usage(format!("--set: unknown key `{k}`")));
        }
        if v.is_empty() {
            return Err(usage(format!("--set {k}: empty value")));
        }
        kv.insert(k, v);
    }
    for (k, v) in flags {
        if let Some(v) = v {
            kv.insert(*k, v.as_str());
        }
    }
    Ok(kv)
}

fn parse_key<T: std::str::FromStr>(kv: &KeyValues, key: &str) -> Result<Option<T>, CliError> {
    kv.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| usage(format!("{key}: cannot parse `{v}`")))
        })
        .transpose()
}

fn parse_list(kv: &KeyValues, key: &str) -> Result<Option<Vec<f64>>, CliError> {
    kv.get(key)
        .map(|v| {
            v.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| usage(format!("{key}: cannot parse `{s}` in `{v}`")))
                })
                .collect()
        })
        .transpose()
}

fn output_dir(kv: &KeyValues) -> Result<PathBuf, CliError> {
    if let Some(dir) = kv.get("out") {
        return Ok(PathBuf::from(dir));
    }
    match std::env::var_os(OUT_ENV) {
        Some(dir) if !dir.is_empty() => Ok(PathBuf::from(dir)),
        _ => Err(usage(format!("--out: no output directory given and {OUT_ENV} is not set"))),
    }
}

fn parse_rule(kv: &KeyValues) -> Result<LeadershipRule, CliError> {
    match kv.get("rule") {
        None => Ok(LeadershipRule::Generalized),
        Some(s) => LeadershipRule::parse(s)
            .ok_or_else(|| usage(format!("rule: `{s}` is not one of binary, generalized"))),
    }
}

fn parse_momentum(kv: &KeyValues) -> Result<MomentumMode, CliError> {
    match kv.get("momentum") {
        None => Ok(MomentumMode::Implicit),
        Some(s) => MomentumMode::parse(s)
            .ok_or_else(|| usage(format!("momentum: `{s}` is not one of explicit, implicit"))),
    }
}

fn model_usage(key: &str) -> impl Fn(ModelError) -> CliError + '_ {
    move |e| usage(format!("{key}: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Micro,
    Macro,
}

impl Mode {
    fn name(&self) -> &'static str {
        match self {
            Mode::Micro => "micro",
            Mode::Macro => "macro",
        }
    }
}

/// Fully resolved `run` invocation.
#[derive(Debug, Clone)]
struct RunPlan {
    scenario: Scenario,
    mode: Mode,
    out: PathBuf,
    seed: u64,
    particles: usize,
    rule: LeadershipRule,
    momentum: MomentumMode,
    linear_tol: f64,
    max_iterations: usize,
    snapshots: usize,
    steps: usize,
}

impl RunPlan {
    fn resolve(kv: &KeyValues) -> Result<Self, CliError> {
        let name = kv
            .get("scenario")
            .ok_or_else(|| usage("--scenario: missing (valid names: ".to_string() + &all_names() + ")"))?;
        let parsed = ScenarioName::parse(name).ok_or_else(|| {
            usage(format!("--scenario: unknown scenario `{name}`; valid names: {}", all_names()))
        })?;
        let mut scenario = if parsed == ScenarioName::Test1d {
            let r = parse_key::<f64>(kv, "R")?.unwrap_or(0.01);
            let eps = parse_key::<f64>(kv, "epsilon")?.unwrap_or(1e-4);
            if !(r > 0.0 && r.is_finite() && eps > 0.0 && eps.is_finite()) {
                return Err(usage("R, epsilon: must be positive and finite"));
            }
            Scenario::test1d(r, eps)
        } else {
            build_scenario(name).map_err(model_usage("--scenario"))?
        };
        scenario.params = apply_params(kv, scenario.params).map_err(model_usage("params"))?;
        scenario.params.validate().map_err(model_usage("params"))?;
        if let Some(dt) = parse_key::<f64>(kv, "dt")? {
            scenario.dt = dt;
        }
        if let Some(t) = parse_key::<f64>(kv, "T")? {
            scenario.horizon = t;
        }
        if let Some(dx) = parse_key::<f64>(kv, "dx")? {
            scenario.spacing = dx;
        }
        if let Some(v) = parse_key::<f64>(kv, "rho_bc")? {
            scenario.bc.rho = v;
        }
        if let Some(v) = parse_key::<f64>(kv, "l_bc")? {
            scenario.bc.l = v;
        }
        for (k, key) in BC_VELOCITY_KEYS.iter().enumerate() {
            if let Some(v) = parse_key::<f64>(kv, key)? {
                scenario.bc.u[k] = v;
            }
        }
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(usage(format!("{key}: must be positive and finite, got {v}")))
            }
        };
        positive("dt", scenario.dt)?;
        positive("T", scenario.horizon)?;
        positive("dx", scenario.spacing)?;
        scenario.grid().map_err(model_usage("dx"))?;
        let (steps, dt) = scenario.steps();
        scenario.dt = dt;
        let mode = match kv.get("mode").unwrap_or("macro") {
            "micro" => Mode::Micro,
            "macro" => Mode::Macro,
            other => return Err(usage(format!("--mode: `{other}` is not one of micro, macro"))),
        };
        let plan = RunPlan {
            mode,
            out: output_dir(kv)?,
            seed: parse_key(kv, "seed")?.unwrap_or(0),
            particles: parse_key(kv, "N")?.unwrap_or(100_000),
            rule: parse_rule(kv)?,
            momentum: parse_momentum(kv)?,
            linear_tol: parse_key(kv, "linear_tol")?.unwrap_or(1e-10),
            max_iterations: parse_key(kv, "max_iterations")?.unwrap_or(2000),
            snapshots: parse_key(kv, "snapshots")?.unwrap_or(10),
            steps,
            scenario,
        };
        positive("linear_tol", plan.linear_tol)?;
        if plan.snapshots == 0 {
            return Err(usage("snapshots: must be at least 1"));
        }
        if plan.mode == Mode::Micro {
            if plan.scenario.dim != 1 {
                return Err(usage(format!(
                    "--mode micro: particle runs are one-dimensional, `{}` is 2D",
                    plan.scenario.name
                )));
            }
            if plan.particles < 2 {
                return Err(usage("--N: need at least 2 particles"));
            }
            let bound = plan.scenario.params.apply_scaling().max_consistent_dt();
            if plan.scenario.dt > bound * (1.0 + 1e-12) {
                return Err(usage(format!(
                    "dt: {:e} exceeds the particle consistency bound {bound:e}",
                    plan.scenario.dt
                )));
            }
        }
        Ok(plan)
    }

    /// Resolved settings in config file syntax.
    fn manifest(&self) -> KeyValues {
        let sc = &self.scenario;
        let mut kv = KeyValues::default();
        kv.insert("scenario", sc.name.as_str());
        kv.insert("mode", self.mode.name());
        kv.insert("out", self.out.display().to_string());
        kv.insert("seed", self.seed.to_string());
        kv.insert("N", self.particles.to_string());
        kv.insert("rule", self.rule.name());
        kv.insert("momentum", self.momentum.name());
        kv.insert("dt", sc.dt.to_string());
        kv.insert("T", sc.horizon.to_string());
        kv.insert("dx", sc.spacing.to_string());
        kv.insert("linear_tol", self.linear_tol.to_string());
        kv.insert("max_iterations", self.max_iterations.to_string());
        kv.insert("snapshots", self.snapshots.to_string());
        kv.insert("rho_bc", sc.bc.rho.to_string());
        kv.insert("u1_bc", sc.bc.u[0].to_string());
        kv.insert("u2_bc", sc.bc.u[1].to_string());
        kv.insert("l_bc", sc.bc.l.to_string());
        for (k, v) in sc.params.entries() {
            kv.insert(k, v.to_string());
        }
        kv
    }
}

fn all_names() -> String {
    format!("{}, custom", ScenarioName::valid_names())
}

fn run_keys() -> Vec<&'static str> {
    RUN_KEYS
        .iter()
        .chain(BC_VELOCITY_KEYS.iter())
        .chain(PARAM_KEYS.iter())
        .copied()
        .collect()
}

fn write_manifest(dir: &Path, command: &str, kv: &KeyValues) -> Result<(), CliError> {
    let created = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut text = format!(
        "# flockscale {} {command}\n# created_unix={created}\n",
        env!("CARGO_PKG_VERSION")
    );
    for (k, v) in kv.iter() {
        let _ = writeln!(text, "{k} = {v}");
    }
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn has_snapshots(dir: &Path) -> bool {
    let Ok(entries) = fs::read_dir(dir) else {
        return false;
    };
    entries.filter_map(Result::ok).any(|e| {
        e.file_name()
            .to_str()
            .is_some_and(|n| n.starts_with("snap_") && n.ends_with(".csv"))
    })
}

fn run_command(args: RunArgs) -> Result<(), CliError> {
    let keys = run_keys();
    let kv = layered(
        args.config.as_deref(),
        &args.set,
        &[
            ("scenario", &args.scenario),
            ("mode", &args.mode),
            ("out", &args.out),
            ("seed", &args.seed),
            ("N", &args.particles),
        ],
        &keys,
    )?;
    let plan = RunPlan::resolve(&kv)?;
    if has_snapshots(&plan.out) {
        return Err(usage(format!(
            "--out: {} already holds snapshot files",
            plan.out.display()
        )));
    }
    let sc = &plan.scenario;
    let grid = sc.grid().map_err(runtime)?;
    log::info!(
        "{} {} on {:?} cells, {} steps of {:e}",
        sc.name,
        plan.mode.name(),
        grid.cells(),
        plan.steps,
        sc.dt
    );
    let mut series = SnapshotSeries::new(grid, sc.params)
        .with_metadata("scenario", sc.name)
        .with_metadata("mode", plan.mode.name())
        .with_metadata("T", sc.horizon)
        .with_metadata("dt", sc.dt)
        .with_metadata("steps", plan.steps)
        .with_metadata("rho_bc", sc.bc.rho)
        .with_metadata("u1_bc", sc.bc.u[0])
        .with_metadata("u2_bc", sc.bc.u[1])
        .with_metadata("l_bc", sc.bc.l)
        .with_metadata("version", env!("CARGO_PKG_VERSION"));
    match plan.mode {
        Mode::Macro => {
            let mut cfg = SolverConfig::new(sc.dt, sc.horizon);
            cfg.mode = plan.momentum;
            cfg.linear_tol = plan.linear_tol;
            cfg.max_iterations = plan.max_iterations;
            cfg.snapshots = plan.snapshots;
            let report = run_macro(&grid, &sc.params, &sc.bc, &sc.initial_state(&grid), &cfg)
                .map_err(runtime)?;
            series = series
                .with_metadata("momentum", plan.momentum.name())
                .with_metadata("linear_tol", plan.linear_tol)
                .with_metadata("leadership_excursion", report.leadership_excursion);
            series.snapshots = report.snapshots;
        }
        Mode::Micro => {
            let mut cfg = MicroConfig::new(plan.particles, sc.dt, sc.horizon, plan.seed);
            cfg.rule = plan.rule;
            cfg.snapshots = plan.snapshots;
            let report = run_micro(sc, &grid, &cfg).map_err(runtime)?;
            let c = report.counters;
            series = series
                .with_metadata("rule", plan.rule.name())
                .with_metadata("N", plan.particles)
                .with_metadata("seed", plan.seed)
                .with_metadata("final_particles", report.final_particles)
                .with_metadata("removed", c.removed)
                .with_metadata("clamped", c.clamped)
                .with_metadata("coincident", c.coincident)
                .with_metadata("out_of_grid", c.out_of_grid);
            series.snapshots = report.snapshots;
        }
    }
    let paths = series.write(&plan.out).map_err(runtime)?;
    write_manifest(&plan.out, "run", &plan.manifest())?;
    log::info!("wrote {} snapshots to {}", paths.len(), plan.out.display());
    Ok(())
}

fn compare_command(args: CompareArgs) -> Result<(), CliError> {
    let kv = layered(
        args.config.as_deref(),
        &args.set,
        &[
            ("R", &args.radius),
            ("eps", &args.eps),
            ("N", &args.particles),
            ("seed", &args.seed),
            ("seeds", &args.seeds),
            ("out", &args.out),
        ],
        &COMPARE_KEYS,
    )?;
    let radii = parse_list(&kv, "R")?.unwrap_or_else(|| vec![0.01]);
    let epsilons = parse_list(&kv, "eps")?.unwrap_or_else(|| vec![1e-4]);
    let particles: usize = parse_key(&kv, "N")?.unwrap_or(100_000);
    let seed: u64 = parse_key(&kv, "seed")?.unwrap_or(42);
    let seeds: u64 = parse_key(&kv, "seeds")?.unwrap_or(1);
    let opts = CompareOptions {
        rule: parse_rule(&kv)?,
        mode: parse_momentum(&kv)?,
        horizon: parse_key(&kv, "T")?.unwrap_or(5.0),
    };
    let out = output_dir(&kv)?;
    for (key, list) in [("--R", &radii), ("--eps", &epsilons)] {
        if let Some(v) = list.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(usage(format!("{key}: values must be positive and finite, got {v}")));
        }
    }
    if particles < 2 {
        return Err(usage("--N: need at least 2 particles"));
    }
    if seeds == 0 {
        return Err(usage("--seeds: must be at least 1"));
    }
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) {
        return Err(usage("T: must be positive and finite"));
    }
    let seed_list: Vec<u64> = (0..seeds)
        .map(|k| {
            seed.checked_add(k)
                .ok_or_else(|| usage("--seed: seed range overflows u64"))
        })
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for &r in &radii {
        for &eps in &epsilons {
            log::info!("comparison R={r:e} epsilon={eps:e} N={particles} seeds={seeds}");
            rows.extend(
                run_comparison_batch(r, eps, particles, &seed_list, &opts).map_err(runtime)?,
            );
        }
    }
    fs::create_dir_all(&out).map_err(|e| runtime(format!("{}: {e}", out.display())))?;
    write_comparison_csv(&out.join(COMPARISON_FILE), &rows).map_err(runtime)?;
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let mut manifest = KeyValues::default();
    manifest.insert("R", join(&radii));
    manifest.insert("eps", join(&epsilons));
    manifest.insert("N", particles.to_string());
    manifest.insert("seed", seed.to_string());
    manifest.insert("seeds", seeds.to_string());
    manifest.insert("T", opts.horizon.to_string());
    manifest.insert("rule", opts.rule.name());
    manifest.insert("momentum", opts.mode.name());
    manifest.insert("out", out.display().to_string());
    write_manifest(&out, "compare1d", &manifest)
}

fn metrics_command(args: MetricsArgs) -> Result<(), CliError> {
    if !args.input.is_dir() {
        return Err(usage(format!("--in: {} is not a directory", args.input.display())));
    }
    let series = SnapshotSeries::read(&args.input).map_err(runtime)?;
    let mut text = String::from(
        "step,time,centroid1,centroid2,support_diameter,support_radius,local_max_count,radial_argmax,ring\n",
    );
    for (step, state) in &series.snapshots {
        match pattern_metrics(state, &series.grid) {
            Ok(m) => {
                let _ = writeln!(
                    text,
                    "{step},{},{},{},{},{},{},{},{}",
                    state.time,
                    m.centroid[0],
                    m.centroid[1],
                    m.support_diameter,
                    m.support_radius,
                    m.local_max_count,
                    m.radial_argmax(),
                    m.has_ring()
                );
            }
            Err(_) => {
                let _ = writeln!(text, "{step},{},NaN,NaN,0,0,0,NaN,false", state.time);
            }
        }
    }
    print!("{text}");
    Ok(())
}

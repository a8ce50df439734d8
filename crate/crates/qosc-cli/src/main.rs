//! Command-line front end for the oscillator moment library: evolve
//! trajectories, run validation suites, sweep parameters, and print the
//! closed-form generator maps.
//!
//! Exit codes: 0 success, 1 validation failure, 2 usage or configuration
//! error, 3 physicality violation in strict mode.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qosc::evolution::{trajectory_ode, Trajectory};
use qosc::fock::{gaussian_state, oracle_trajectory};
use qosc::integrate::StepControl;
use qosc::moments::{apply_dissipative, apply_unitary, PHYSICAL_TOL};
use qosc::validate::{run_suite, SuiteKind, SuiteReport};
use qosc::{
    DissipativeCoefficients, EquationKind, GaussianMoments, Generator, MasterEquationSpec,
    TruncationConfig, UnitaryCoefficients,
};
use serde::{Deserialize, Serialize};

/// Moment deviation allowed between the closed-form trajectory and the
/// number-basis oracle when `--oracle` is on.
const ORACLE_TOL: f64 = 1e-6;

const EXIT_VALIDATION: i32 = 1;
const EXIT_CONFIG: i32 = 2;
const EXIT_PHYSICALITY: i32 = 3;

#[derive(Parser)]
#[command(
    name = "qosc",
    version,
    about = "Damped quantum oscillator moment evolutions and validation suites"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve Gaussian moments on a time grid and emit a CSV trajectory.
    #[command(allow_negative_numbers = true)]
    Evolve(EvolveArgs),
    /// Run validation suites and report each check.
    Validate(ValidateArgs),
    /// Run one evolution per value of a swept parameter, in parallel.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Print the closed-form single-generator maps at a parameter value.
    #[command(allow_negative_numbers = true)]
    Table(TableArgs),
}

/// Equation/physics flags shared by `evolve` and `sweep`. Every flag has a
/// config-file counterpart under the same (kebab-case) key.
#[derive(Args, Clone, Default)]
struct PhysicsArgs {
    /// Equation kind: kl, cl, hpz, or raw (explicit coefficients).
    #[arg(long)]
    eq: Option<String>,
    /// Oscillator frequency (presets only).
    #[arg(long)]
    omega0: Option<f64>,
    /// Relaxation constant.
    #[arg(long)]
    gamma: Option<f64>,
    /// Thermal variance parameter (presets only; >= 1/2 unless --allow-low-b).
    #[arg(long)]
    b: Option<f64>,
    /// Anomalous-diffusion coefficient (hpz only).
    #[arg(long)]
    d: Option<f64>,
    /// Rotation coefficient (raw mode).
    #[arg(long)]
    theta: Option<f64>,
    /// Hyperbolic-rotation coefficient (raw mode).
    #[arg(long)]
    phi: Option<f64>,
    /// Scaling coefficient (raw mode).
    #[arg(long)]
    psi: Option<f64>,
    /// Isotropic-diffusion weight (raw mode).
    #[arg(long)]
    eta0: Option<f64>,
    /// Anisotropic-diffusion weight (raw mode).
    #[arg(long)]
    eta1: Option<f64>,
    /// Cross-diffusion weight (raw mode).
    #[arg(long)]
    eta2: Option<f64>,
    /// Initial state: vacuum, coherent:X,P, thermal:B, or
    /// principal:X,P,NU,ZETA,CHI.
    #[arg(long)]
    init: Option<String>,
    /// Accept an initial state below the uncertainty bound.
    #[arg(long)]
    allow_unphysical: bool,
    /// Accept b < 1/2 (exploratory, long-time state may be unphysical).
    #[arg(long)]
    allow_low_b: bool,
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    /// Final time; the grid is 0, dt, 2 dt, ... up to t-max.
    #[arg(long)]
    t_max: Option<f64>,
    /// Grid spacing (> 0).
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct EvolveArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 3 with a positivity report if delta dips below 1/4.
    #[arg(long)]
    strict: bool,
    /// Cross-check the trajectory against the number-basis oracle.
    #[arg(long)]
    oracle: bool,
    /// Oracle basis dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Oracle tail-occupation tolerance.
    #[arg(long)]
    tail_tol: Option<f64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Suites to run: tables, commutators, oracle, closed_forms, limits.
    /// All five when omitted.
    suites: Vec<String>,
    /// Write the machine-readable JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Omega0,
    Gamma,
    B,
    D,
}

impl SweepParam {
    fn name(self) -> &'static str {
        match self {
            SweepParam::Omega0 => "omega0",
            SweepParam::Gamma => "gamma",
            SweepParam::B => "b",
            SweepParam::D => "d",
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file for the base run; flags override.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Preset parameter to sweep.
    #[arg(long, value_enum)]
    param: SweepParam,
    /// First swept value.
    #[arg(long)]
    from: f64,
    /// Last swept value (inclusive).
    #[arg(long)]
    to: f64,
    /// Number of runs (>= 1; evenly spaced values).
    #[arg(long)]
    steps: usize,
    /// Directory for per-run CSVs and summary.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct TableArgs {
    /// Finite map parameter at which every generator map is evaluated.
    #[arg(long)]
    param: f64,
}

/// Config-file image of the evolve/sweep flags; keys mirror flag spellings.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    eq: Option<String>,
    omega0: Option<f64>,
    gamma: Option<f64>,
    b: Option<f64>,
    d: Option<f64>,
    theta: Option<f64>,
    phi: Option<f64>,
    psi: Option<f64>,
    eta0: Option<f64>,
    eta1: Option<f64>,
    eta2: Option<f64>,
    init: Option<String>,
    #[serde(rename = "t-max", alias = "t_max")]
    t_max: Option<f64>,
    dt: Option<f64>,
    out: Option<PathBuf>,
    strict: Option<bool>,
    #[serde(rename = "allow-unphysical", alias = "allow_unphysical")]
    allow_unphysical: Option<bool>,
    #[serde(rename = "allow-low-b", alias = "allow_low_b")]
    allow_low_b: Option<bool>,
    oracle: Option<bool>,
    dim: Option<usize>,
    #[serde(rename = "tail-tol", alias = "tail_tol")]
    tail_tol: Option<f64>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Either a validated preset or an explicit coefficient set.
#[derive(Clone, Copy)]
enum Equation {
    Preset(MasterEquationSpec),
    Raw(UnitaryCoefficients, DissipativeCoefficients),
}

impl Equation {
    fn coefficients(&self) -> (UnitaryCoefficients, DissipativeCoefficients) {
        match self {
            Equation::Preset(spec) => spec.coefficients(),
            Equation::Raw(u, d) => (*u, *d),
        }
    }

    fn trajectory(&self, m0: &GaussianMoments, times: &[f64]) -> Result<Trajectory> {
        match self {
            Equation::Preset(spec) => Ok(spec.trajectory_closed(m0, times)?),
            Equation::Raw(u, d) => Ok(trajectory_ode(m0, u, d, times, &StepControl::default())?),
        }
    }
}

/// Fully resolved evolve/sweep settings after merging flags over the file.
struct RunSettings {
    equation: Equation,
    m0: GaussianMoments,
    times: Vec<f64>,
}

fn main() {
    // die quietly when a downstream reader closes the pipe, like any
    // other unix filter; rust's runtime ignores SIGPIPE by default
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_CONFIG
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Evolve(args) => run_evolve(args),
        Cmd::Validate(args) => run_validate(args),
        Cmd::Sweep(args) => run_sweep(args),
        Cmd::Table(args) => run_table(args),
    }
}

fn parse_init(text: &str) -> Result<GaussianMoments> {
    let (head, rest) = match text.split_once(':') {
        Some((head, rest)) => (head, Some(rest)),
        None => (text, None),
    };
    let nums = |rest: Option<&str>, n: usize| -> Result<Vec<f64>> {
        let rest = rest.ok_or_else(|| anyhow!("initial state {head:?} needs {n} value(s)"))?;
        let vals = rest
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| anyhow!("bad number {s:?} in initial state"))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != n {
            bail!("initial state {head:?} needs {n} value(s), got {}", vals.len());
        }
        Ok(vals)
    };
    match head {
        "vacuum" => {
            if rest.is_some() {
                bail!("initial state \"vacuum\" takes no values");
            }
            Ok(GaussianMoments::vacuum())
        }
        "coherent" => {
            let v = nums(rest, 2)?;
            Ok(GaussianMoments::coherent(v[0], v[1]))
        }
        "thermal" => {
            let v = nums(rest, 1)?;
            Ok(GaussianMoments::thermal(v[0]))
        }
        "principal" => {
            let v = nums(rest, 5)?;
            Ok(GaussianMoments::from_principal_axes(v[0], v[1], v[2], v[3], v[4]))
        }
        other => bail!(
            "unknown initial state {other:?} (expected vacuum, coherent:X,P, thermal:B, or principal:X,P,NU,ZETA,CHI)"
        ),
    }
}

/// Time grid 0, dt, ..., n*dt with the final point snapped to t_max when it
/// lands there up to rounding.
fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        bail!("dt must be > 0, got {dt}");
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        bail!("t-max must be >= 0, got {t_max}");
    }
    if t_max != 0.0 && t_max < dt {
        bail!("t-max must be 0 or >= dt, got t-max {t_max} with dt {dt}");
    }
    let n = (t_max / dt + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| i as f64 * dt).collect();
    if let Some(last) = times.last_mut() {
        if (*last - t_max).abs() <= 1e-9 * t_max.max(1.0) {
            *last = t_max;
        }
    }
    Ok(times)
}

fn resolve(physics: &PhysicsArgs, grid: &GridArgs, file: &FileConfig) -> Result<RunSettings> {
    let eq_name = physics
        .eq
        .clone()
        .or_else(|| file.eq.clone())
        .ok_or_else(|| anyhow!("no equation kind: pass --eq or set \"eq\" in the config"))?;
    let omega0 = physics.omega0.or(file.omega0).unwrap_or(1.0);
    let gamma = physics.gamma.or(file.gamma).unwrap_or(0.0);
    let b = physics.b.or(file.b).unwrap_or(0.5);
    let d = physics.d.or(file.d).unwrap_or(0.0);
    let allow_low_b = physics.allow_low_b || file.allow_low_b.unwrap_or(false);
    let allow_unphysical = physics.allow_unphysical || file.allow_unphysical.unwrap_or(false);

    // refuse parameters the selected mode would silently ignore
    let named = |set: &[(bool, &'static str)]| -> String {
        let hits: Vec<_> = set.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect();
        hits.join(", ")
    };
    let raw_only = named(&[
        (physics.theta.or(file.theta).is_some(), "theta"),
        (physics.phi.or(file.phi).is_some(), "phi"),
        (physics.psi.or(file.psi).is_some(), "psi"),
        (physics.eta0.or(file.eta0).is_some(), "eta0"),
        (physics.eta1.or(file.eta1).is_some(), "eta1"),
        (physics.eta2.or(file.eta2).is_some(), "eta2"),
    ]);
    let preset_only = named(&[
        (physics.omega0.or(file.omega0).is_some(), "omega0"),
        (physics.b.or(file.b).is_some(), "b"),
        (physics.d.or(file.d).is_some(), "d"),
    ]);

    let equation = if eq_name.eq_ignore_ascii_case("raw") {
        if !preset_only.is_empty() {
            bail!("raw mode takes explicit coefficients; {preset_only} applies only to the presets");
        }
        let u = UnitaryCoefficients::new(
            physics.theta.or(file.theta).unwrap_or(0.0),
            physics.phi.or(file.phi).unwrap_or(0.0),
            physics.psi.or(file.psi).unwrap_or(0.0),
        );
        let diss = DissipativeCoefficients::new(
            gamma,
            physics.eta0.or(file.eta0).unwrap_or(0.0),
            physics.eta1.or(file.eta1).unwrap_or(0.0),
            physics.eta2.or(file.eta2).unwrap_or(0.0),
        );
        Equation::Raw(u, diss)
    } else {
        if !raw_only.is_empty() {
            bail!(
                "preset {eq_name:?} derives all coefficients from omega0, gamma, b, d; \
                 {raw_only} applies only to --eq raw"
            );
        }
        let kind = EquationKind::from_str(&eq_name)?;
        if kind != EquationKind::HuPazZhang && d != 0.0 {
            bail!("preset {eq_name:?} has no anomalous diffusion channel; d applies only to hpz");
        }
        let spec = if allow_low_b {
            MasterEquationSpec::exploratory(kind, omega0, gamma, b, d)?
        } else {
            MasterEquationSpec::new(kind, omega0, gamma, b, d)?
        };
        Equation::Preset(spec)
    };

    let init_text = physics
        .init
        .clone()
        .or_else(|| file.init.clone())
        .unwrap_or_else(|| "vacuum".to_string());
    let m0 = parse_init(&init_text)?;
    if !allow_unphysical && !m0.is_physical(PHYSICAL_TOL) {
        bail!(
            "initial state has delta {} < 1/4 (pass --allow-unphysical to accept it)",
            m0.delta()
        );
    }

    let t_max = grid.t_max.or(file.t_max).unwrap_or(10.0);
    let dt = grid.dt.or(file.dt).unwrap_or(0.1);
    let times = time_grid(t_max, dt)?;
    Ok(RunSettings {
        equation,
        m0,
        times,
    })
}

/// 17 significant digits: lossless f64 round-trips, diff-able output.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

const CSV_HEADER: &str = "t,mean_x,mean_p,sigma_xx,sigma_pp,sigma_xp,delta,g0,g1,g2";

fn render_csv(traj: &Trajectory) -> String {
    let mut text = String::with_capacity(32 + traj.points.len() * 220);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for p in &traj.points {
        let m = &p.moments;
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt(p.t),
            fmt(m.mean_x),
            fmt(m.mean_p),
            fmt(m.sigma_xx),
            fmt(m.sigma_pp),
            fmt(m.sigma_xp),
            fmt(p.delta),
            fmt(p.g.g0),
            fmt(p.g.g1),
            fmt(p.g.g2),
        );
    }
    text
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout()
                .lock()
                .write_all(text.as_bytes())
                .context("writing stdout")
        }
    }
}

fn run_evolve(args: EvolveArgs) -> Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    let settings = resolve(&args.physics, &args.grid, &file)?;
    let strict = args.strict || file.strict.unwrap_or(false);
    let oracle = args.oracle || file.oracle.unwrap_or(false);
    let out = args.out.or(file.out);

    let traj = settings.equation.trajectory(&settings.m0, &settings.times)?;
    write_out(out.as_deref(), &render_csv(&traj))?;

    if oracle {
        if !settings.m0.is_physical(PHYSICAL_TOL) {
            bail!("the oracle cross-check needs a physical initial state");
        }
        let cfg = TruncationConfig {
            dim: args.dim.or(file.dim).unwrap_or(TruncationConfig::default().dim),
            tail_tol: args
                .tail_tol
                .or(file.tail_tol)
                .unwrap_or(TruncationConfig::default().tail_tol),
        };
        let (u, d) = settings.equation.coefficients();
        let rho0 = gaussian_state(&cfg, &settings.m0)?;
        let sampled = oracle_trajectory(&u, &d, &rho0, &settings.times, &cfg)?;
        let mut dev = 0.0f64;
        let mut at = 0.0f64;
        for (p, m) in traj.points.iter().zip(&sampled) {
            let here = p.moments.max_abs_diff(m);
            if here > dev {
                dev = here;
                at = p.t;
            }
        }
        if dev > ORACLE_TOL {
            eprintln!(
                "oracle mismatch: moment deviation {dev:.3e} at t = {at} exceeds {ORACLE_TOL:.1e}"
            );
            return Ok(EXIT_VALIDATION);
        }
        eprintln!("oracle check passed: worst moment deviation {dev:.3e} (dim {})", cfg.dim);
    }

    if strict {
        if let Some(code) = strict_report(&traj, &settings.equation) {
            return Ok(code);
        }
    }
    Ok(0)
}

/// Prints the positivity report to stderr when any grid point violates the
/// uncertainty bound; returns the exit code to use.
fn strict_report(traj: &Trajectory, equation: &Equation) -> Option<i32> {
    let violations: Vec<_> = traj
        .points
        .iter()
        .filter(|p| !p.moments.is_physical(PHYSICAL_TOL))
        .collect();
    let first = violations.first()?;
    let worst = violations
        .iter()
        .min_by(|a, b| a.delta.total_cmp(&b.delta))
        .expect("nonempty");
    eprintln!("physicality violation: generalized uncertainty dips below 1/4");
    eprintln!("  first violation at t = {} (delta {})", first.t, first.delta);
    eprintln!(
        "  minimum delta {} at t = {} ({} of {} grid points in violation)",
        worst.delta,
        worst.t,
        violations.len(),
        traj.points.len()
    );
    if let Equation::Preset(spec) = equation {
        if let Ok(report) = spec.positivity_check() {
            eprintln!(
                "  long-time limit ({}): exact {}, leading order {}",
                spec.kind, report.limit_exact, report.limit_leading_order
            );
        }
    }
    Some(EXIT_PHYSICALITY)
}

#[derive(Serialize)]
struct SuiteSection {
    suite: &'static str,
    #[serde(flatten)]
    report: SuiteReport,
}

fn run_validate(args: ValidateArgs) -> Result<i32> {
    let kinds: Vec<SuiteKind> = if args.suites.is_empty() {
        SuiteKind::ALL.to_vec()
    } else {
        args.suites
            .iter()
            .map(|s| Ok(SuiteKind::from_str(s)?))
            .collect::<Result<_>>()?
    };
    let mut sections = Vec::with_capacity(kinds.len());
    let mut failed = 0usize;
    for kind in kinds {
        println!("suite {}:", kind.name());
        let report = run_suite(kind);
        for check in &report.checks {
            println!("  {}", check.summary_line());
            if !check.passed {
                failed += 1;
            }
        }
        sections.push(SuiteSection {
            suite: kind.name(),
            report,
        });
    }
    if let Some(path) = &args.report {
        let json = serde_json::to_string_pretty(&sections).context("serializing report")?;
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    if failed > 0 {
        eprintln!("{failed} check(s) failed");
        return Ok(EXIT_VALIDATION);
    }
    println!("all checks passed");
    Ok(0)
}

fn run_sweep(args: SweepArgs) -> Result<i32> {
    let file = FileConfig::load(args.config.as_deref())?;
    let base = resolve(&args.physics, &args.grid, &file)?;
    let Equation::Preset(base_spec) = base.equation else {
        bail!("sweep varies preset parameters; --eq raw is not sweepable");
    };
    if matches!(args.param, SweepParam::D) && base_spec.kind != EquationKind::HuPazZhang {
        bail!("sweeping d requires --eq hpz; the other presets have no anomalous diffusion channel");
    }
    if args.steps == 0 {
        bail!("steps must be >= 1");
    }
    let allow_low_b =
        args.physics.allow_low_b || file.allow_low_b.unwrap_or(false);

    let values: Vec<f64> = (0..args.steps)
        .map(|i| {
            if args.steps == 1 {
                args.from
            } else {
                args.from + (args.to - args.from) * i as f64 / (args.steps - 1) as f64
            }
        })
        .collect();
    // validate the whole grid up front: a bad value fails the sweep before
    // any file is written
    let specs: Vec<MasterEquationSpec> = values
        .iter()
        .map(|&v| {
            let mut omega0 = base_spec.omega0;
            let mut gamma = base_spec.gamma;
            let mut b = base_spec.b;
            let mut d = base_spec.d;
            match args.param {
                SweepParam::Omega0 => omega0 = v,
                SweepParam::Gamma => gamma = v,
                SweepParam::B => b = v,
                SweepParam::D => d = v,
            }
            let spec = if allow_low_b {
                MasterEquationSpec::exploratory(base_spec.kind, omega0, gamma, b, d)?
            } else {
                MasterEquationSpec::new(base_spec.kind, omega0, gamma, b, d)?
            };
            spec.delta_longtime()
                .with_context(|| format!("{} = {v} is outside the oscillatory regime", args.param.name()))?;
            Ok(spec)
        })
        .collect::<Result<_>>()?;

    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    struct Row {
        value: f64,
        delta_final: f64,
        delta_min: f64,
        physical: bool,
        file: String,
    }
    let results: Mutex<Vec<Option<Result<Row>>>> =
        Mutex::new((0..specs.len()).map(|_| None).collect());
    let workers = args
        .workers
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .clamp(1, specs.len());

    std::thread::scope(|scope| {
        for worker in 0..workers {
            let results = &results;
            let specs = &specs;
            let values = &values;
            let base = &base;
            let out_dir = &args.out_dir;
            scope.spawn(move || {
                for i in (worker..specs.len()).step_by(workers) {
                    let outcome = (|| -> Result<Row> {
                        let traj = specs[i].trajectory_closed(&base.m0, &base.times)?;
                        let name = format!("sweep_{i:03}.csv");
                        fs::write(out_dir.join(&name), render_csv(&traj))
                            .with_context(|| format!("writing {name}"))?;
                        let last = traj.final_point().expect("nonempty grid");
                        let delta_min = traj.min_delta();
                        Ok(Row {
                            value: values[i],
                            delta_final: last.delta,
                            delta_min,
                            physical: delta_min >= 0.25 - PHYSICAL_TOL,
                            file: name,
                        })
                    })();
                    results.lock().expect("no poisoned lock")[i] = Some(outcome);
                }
            });
        }
    });

    let rows = results.into_inner().expect("no poisoned lock");
    let mut summary = String::from("index,param,value,delta_final,delta_min,physical,file\n");
    for (i, slot) in rows.into_iter().enumerate() {
        let row = slot.expect("every index visited")?;
        let _ = writeln!(
            summary,
            "{i},{},{},{},{},{},{}",
            args.param.name(),
            fmt(row.value),
            fmt(row.delta_final),
            fmt(row.delta_min),
            row.physical,
            row.file,
        );
    }
    let path = args.out_dir.join("summary.csv");
    fs::write(&path, summary).with_context(|| format!("writing {}", path.display()))?;
    println!(
        "swept {} over {} run(s) into {}",
        args.param.name(),
        specs.len(),
        args.out_dir.display()
    );
    Ok(0)
}

fn run_table(args: TableArgs) -> Result<i32> {
    let c = args.param;
    println!("single-generator moment maps at parameter {}", fmt(c));
    for which in Generator::ALL {
        println!("{}:", which.name());
        if which.is_unitary() {
            // columns of the linear mean map; covariances transform by the
            // same matrix congruence
            let e1 = apply_unitary(&GaussianMoments::coherent(1.0, 0.0), which, c)?;
            let e2 = apply_unitary(&GaussianMoments::coherent(0.0, 1.0), which, c)?;
            println!("  mean map [[{:+.6}, {:+.6}],", e1.mean_x, e2.mean_x);
            println!("            [{:+.6}, {:+.6}]]", e1.mean_p, e2.mean_p);
        } else {
            let probe = GaussianMoments::new(1.0, 1.0, 1.0, 1.0, 0.0);
            let mapped = apply_dissipative(&probe, which, c)?;
            if which == Generator::Relaxation {
                // unit probe: the mapped entries are the scale factors
                println!(
                    "  means scale by {:+.6}, covariances by {:+.6}",
                    mapped.mean_x, mapped.sigma_xx
                );
            } else {
                println!(
                    "  sigma_xx {:+.6}  sigma_pp {:+.6}  sigma_xp {:+.6}",
                    mapped.sigma_xx - probe.sigma_xx,
                    mapped.sigma_pp - probe.sigma_pp,
                    mapped.sigma_xp - probe.sigma_xp,
                );
            }
        }
    }
    Ok(0)
}

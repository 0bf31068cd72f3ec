//! Run configuration, the time loop and run reports.

mod output;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};

use crate::cases::{diagnostics, init_case, vortex_period_time, CaseConfig, CaseName, CaseSetup};
use crate::ctm::{max_abs_div, CtmMode, MagneticPair};
use crate::error::{Error, Result};
use crate::grid::Field2D;
use crate::physics::{ENERGY, RHO};
use crate::scheme::{validate_reference, ReferenceState, Scheme};

pub use output::{
    cross_section, field_columns, write_field, write_report, Axis, CrossSection, Format, SectionRequest,
};

/// Everything a run needs besides the case physics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseConfig,
    pub output_dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Write a snapshot every `every` steps instead of at evenly spaced times.
    pub every: Option<usize>,
    /// Number of evenly spaced snapshots after the initial one.
    pub snapshots: usize,
    /// Sections extracted from the final state.
    pub sections: Vec<SectionRequest>,
    /// Adds `uB`, `uperpB` and `beta` columns to snapshots.
    pub diagnostics: bool,
    /// Reserved; the scheme is deterministic.
    pub seed: u64,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(case: CaseName) -> Self {
        RunConfig {
            case: CaseConfig::new(case),
            output_dir: None,
            formats: vec![Format::Csv],
            every: None,
            snapshots: 10,
            sections: Vec::new(),
            diagnostics: true,
            seed: 0,
            verbose: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.every == Some(0) {
            return Err(Error::Config("output cadence 'every' must be positive".into()));
        }
        if self.snapshots == 0 {
            return Err(Error::Config("'snapshots' must be positive".into()));
        }
        self.case.validate()
    }
}

#[derive(Debug, Parser)]
#[command(name = "wbmhd", version, about = "Well-balanced central MHD solver with gravity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario.
    Run(RunArgs),
}

/// Flags of `run`. Every flag is also a key of the configuration file.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// brio-wu | four-state | vortex | hydro-atmosphere | mhd-atmosphere
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Final time, or `period` for the long vortex run time.
    #[arg(long)]
    pub t_final: Option<String>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// on | off | auto
    #[arg(long)]
    pub ctm: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub u0: Option<f64>,
    #[arg(long)]
    pub v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub vortex_b2_sign: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Comma-separated list of csv, vtk.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub every: Option<usize>,
    #[arg(long)]
    pub snapshots: Option<usize>,
    /// Cross section of the final state, e.g. `x@0.0:rho,B2`. Repeatable.
    #[arg(long)]
    pub section: Vec<String>,
    /// on | off
    #[arg(long)]
    pub diagnostics: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Flat key=value file using the flag names as keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short)]
    pub verbose: bool,
}

const KEYS: &[&str] = &[
    "case", "nx", "ny", "t-final", "cfl", "theta", "gamma", "ctm", "mu", "c", "u0", "v0", "vortex-b2-sign",
    "output", "format", "every", "snapshots", "section", "diagnostics", "seed", "verbose",
];

impl RunArgs {
    fn settings(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        put("case", self.case.clone());
        put("nx", self.nx.map(|v| v.to_string()));
        put("ny", self.ny.map(|v| v.to_string()));
        put("t-final", self.t_final.clone());
        put("cfl", self.cfl.map(|v| v.to_string()));
        put("theta", self.theta.map(|v| v.to_string()));
        put("gamma", self.gamma.map(|v| v.to_string()));
        put("ctm", self.ctm.clone());
        put("mu", self.mu.map(|v| v.to_string()));
        put("c", self.c.map(|v| v.to_string()));
        put("u0", self.u0.map(|v| v.to_string()));
        put("v0", self.v0.map(|v| v.to_string()));
        put("vortex-b2-sign", self.vortex_b2_sign.map(|v| v.to_string()));
        put("output", self.output.as_ref().map(|p| p.display().to_string()));
        put("format", self.format.clone());
        put("every", self.every.map(|v| v.to_string()));
        put("snapshots", self.snapshots.map(|v| v.to_string()));
        for s in &self.section {
            put("section", Some(s.clone()));
        }
        put("diagnostics", self.diagnostics.clone());
        put("seed", self.seed.map(|v| v.to_string()));
        put("verbose", self.verbose.then(|| "on".to_string()));
        out
    }

    /// Merges the configuration file (if any) under the flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let mut settings = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_config_file(&text)?
            }
            None => Vec::new(),
        };
        settings.extend(self.settings());
        config_from_settings(&settings)
    }
}

/// Parses `argv` (program name first) of the form `run --case ... [flags]`.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string()))?;
    match cli.command {
        Command::Run(args) => args.into_config(),
    }
}

/// Reads `key = value` lines. `#` starts a comment; unknown keys are errors.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key=value, got '{raw}'", n + 1)))?;
        let key = k.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Usage(format!(
                "config line {}: unknown key '{}'; valid keys: {}",
                n + 1,
                k.trim(),
                KEYS.join(", ")
            )));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Usage(format!("invalid value '{v}' for {key}")))
}

fn parse_switch(key: &str, v: &str) -> Result<bool> {
    match v {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(Error::Usage(format!("{key} must be on or off, got '{v}'"))),
    }
}

/// Builds a configuration from ordered settings; later entries win.
pub fn config_from_settings(settings: &[(String, String)]) -> Result<RunConfig> {
    let case = settings
        .iter()
        .rev()
        .find(|(k, _)| k == "case")
        .map(|(_, v)| v.parse::<CaseName>())
        .transpose()?
        .ok_or_else(|| {
            let names: Vec<_> = CaseName::ALL.iter().map(|c| c.as_str()).collect();
            Error::Usage(format!("missing --case; valid cases: {}", names.join(", ")))
        })?;
    let mut cfg = RunConfig::new(case);
    for (k, v) in settings {
        let c = &mut cfg.case;
        match k.as_str() {
            "case" => {}
            "nx" => c.nx = parse_value(k, v)?,
            "ny" => c.ny = parse_value(k, v)?,
            "t-final" => {
                c.t_final = if v == "period" { vortex_period_time(c.params.kappa_p) } else { parse_value(k, v)? }
            }
            "cfl" => c.cfl = parse_value(k, v)?,
            "theta" => c.theta = parse_value(k, v)?,
            "gamma" => c.gamma = parse_value(k, v)?,
            "ctm" => c.ctm = v.parse::<CtmMode>()?,
            "mu" => c.params.mu = parse_value(k, v)?,
            "c" => c.params.c = parse_value(k, v)?,
            "u0" => c.params.u0 = parse_value(k, v)?,
            "v0" => c.params.v0 = parse_value(k, v)?,
            "vortex-b2-sign" => c.params.vortex_b2_sign = parse_value(k, v)?,
            "output" => cfg.output_dir = Some(PathBuf::from(v)),
            "format" => cfg.formats = v.split(',').map(|f| f.trim().parse()).collect::<Result<_>>()?,
            "every" => cfg.every = Some(parse_value(k, v)?),
            "snapshots" => cfg.snapshots = parse_value(k, v)?,
            "section" => cfg.sections.push(v.parse()?),
            "diagnostics" => cfg.diagnostics = parse_switch(k, v)?,
            "seed" => cfg.seed = parse_value(k, v)?,
            "verbose" => cfg.verbose = parse_switch(k, v)?,
            other => return Err(Error::Usage(format!("unknown key '{other}'"))),
        }
    }
    cfg.case.sync_boundaries();
    cfg.validate()?;
    Ok(cfg)
}

/// One line of the run time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub max_div_b: f64,
    /// Cell-volume weighted sums over the interior.
    pub mass: f64,
    pub energy: f64,
    pub max_delta: f64,
    pub ctm_applied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    Completed,
    Failed(String),
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Completed => f.write_str("completed"),
            Termination::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub case: CaseName,
    pub steps: usize,
    pub wall_time: Duration,
    pub final_time: f64,
    /// One row for the initial state and one per step.
    pub series: Vec<ReportRow>,
    pub status: Termination,
    /// Max-norm residual of the reference state.
    pub reference_residual: f64,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn max_div_b(&self) -> f64 {
        self.series.iter().fold(0.0, |m, r| m.max(r.max_div_b))
    }

    pub fn max_delta(&self) -> f64 {
        self.series.iter().fold(0.0, |m, r| m.max(r.max_delta))
    }
}

/// A case being advanced in time.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub setup: CaseSetup,
    pub scheme: Scheme,
    /// `U - Utilde`, valid on the interior.
    pub delta: Field2D,
    pub t: f64,
    pub steps: usize,
}

impl Simulation {
    pub fn new(config: &CaseConfig) -> Result<Self> {
        Self::from_setup(init_case(config)?)
    }

    pub fn from_setup(setup: CaseSetup) -> Result<Self> {
        let scheme = setup.config.scheme()?;
        let delta = setup.initial_delta();
        Ok(Simulation { setup, scheme, delta, t: 0.0, steps: 0 })
    }

    pub fn reference(&self) -> &ReferenceState {
        &self.setup.reference
    }

    /// Total state with ghosts filled at the current time.
    pub fn total(&self) -> Result<Field2D> {
        Ok(self.scheme.fill_ghosts(&self.delta, self.reference(), self.t)?.1)
    }

    pub fn row(&self, dt: f64, ctm_applied: bool) -> Result<ReportRow> {
        let total = self.total()?;
        let g = total.grid;
        let sum = total.interior_sum();
        Ok(ReportRow {
            step: self.steps,
            t: self.t,
            dt,
            max_div_b: max_abs_div(&MagneticPair::from_field(&total))?,
            mass: sum[RHO] * g.dx * g.dy,
            energy: sum[ENERGY] * g.dx * g.dy,
            max_delta: self.delta.interior_max_abs(),
            ctm_applied,
        })
    }

    /// Advances one step without passing `t_stop`. Errors carry the step
    /// index and time.
    pub fn step(&mut self, t_stop: f64) -> Result<(f64, bool)> {
        let out = self
            .scheme
            .step(&self.delta, &self.setup.reference, self.t, t_stop - self.t)
            .map_err(|e| Error::Solver { step: self.steps + 1, time: self.t, source: Box::new(e) })?;
        self.delta = out.delta;
        self.steps += 1;
        self.t = if out.dt >= t_stop - self.t { t_stop } else { self.t + out.dt };
        Ok((out.dt, out.ctm_applied))
    }

    /// Steps until `t_end`, calling `observe` after each step.
    pub fn run_until(&mut self, t_end: f64, mut observe: impl FnMut(&Simulation, f64, bool) -> Result<()>) -> Result<()> {
        while self.t < t_end {
            let (dt, ctm) = self.step(t_end)?;
            observe(self, dt, ctm)?;
        }
        Ok(())
    }
}

fn snapshot_path(dir: &Path, case: CaseName, index: usize, format: Format) -> PathBuf {
    dir.join(format!("{}_{index:04}.{}", case.as_str().replace('-', "_"), format.extension()))
}

fn write_snapshot(cfg: &RunConfig, sim: &Simulation, dir: &Path, index: usize) -> Result<Vec<PathBuf>> {
    let total = sim.total()?;
    let gas = sim.scheme.gas;
    let diag = diagnostics(&total, &gas)?;
    let title = format!("wbmhd {} t={:.9e}", sim.setup.config.name, sim.t);
    let mut files = Vec::new();
    for &f in &cfg.formats {
        let path = snapshot_path(dir, sim.setup.config.name, index, f);
        write_field(&total, &gas, &diag, cfg.diagnostics, f, &path, &title)?;
        files.push(path);
    }
    Ok(files)
}

/// Runs a configuration and returns its report together with the error that
/// stopped it, if any. The report and a snapshot of the last valid state are
/// written before returning when an output directory is set.
pub fn run_with_report(cfg: &RunConfig) -> (RunReport, Option<Error>) {
    let start = Instant::now();
    let mut report = RunReport {
        case: cfg.case.name,
        steps: 0,
        wall_time: Duration::ZERO,
        final_time: 0.0,
        series: Vec::new(),
        status: Termination::Completed,
        reference_residual: f64::NAN,
        files: Vec::new(),
    };
    let result = drive(cfg, &mut report);
    report.wall_time = start.elapsed();
    let mut error = result.err();
    if let Some(e) = &error {
        report.status = Termination::Failed(e.to_string());
    }
    if let Some(dir) = &cfg.output_dir {
        let path = dir.join("report.csv");
        if let Err(e) = write_report(&report, &path) {
            error.get_or_insert(e);
        } else {
            report.files.push(path);
        }
    }
    (report, error)
}

pub fn run(cfg: &RunConfig) -> Result<RunReport> {
    match run_with_report(cfg) {
        (report, None) => Ok(report),
        (_, Some(e)) => Err(e),
    }
}

fn drive(cfg: &RunConfig, report: &mut RunReport) -> Result<()> {
    cfg.validate()?;
    let mut sim = Simulation::new(&cfg.case)?;
    report.reference_residual = validate_reference(sim.reference(), &sim.scheme.gas).max;
    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        report.files.extend(write_snapshot(cfg, &sim, dir, 0)?);
    }
    report.series.push(sim.row(0.0, false)?);
    let t_final = cfg.case.t_final;
    let stops: Vec<f64> = match cfg.every {
        Some(_) => vec![t_final],
        None => (1..=cfg.snapshots).map(|k| t_final * k as f64 / cfg.snapshots as f64).collect(),
    };
    let mut index = 0;
    let mut last_good = sim.clone();
    for &stop in &stops {
        let outcome = sim.run_until(stop, |s, dt, ctm| {
            report.series.push(s.row(dt, ctm)?);
            report.steps = s.steps;
            report.final_time = s.t;
            if let (Some(n), Some(dir)) = (cfg.every, &cfg.output_dir) {
                if s.steps % n == 0 && s.t < t_final {
                    index += 1;
                    report.files.extend(write_snapshot(cfg, s, dir, index)?);
                }
            }
            if cfg.verbose && s.steps % 100 == 0 {
                eprintln!("step {:>7}  t = {:.6e}  dt = {:.3e}", s.steps, s.t, dt);
            }
            Ok(())
        });
        if let Err(e) = outcome {
            if let Some(dir) = &cfg.output_dir {
                let path = dir.join(format!("{}_last_valid.csv", cfg.case.name.as_str().replace('-', "_")));
                let flushed = last_good.total().and_then(|total| {
                    let gas = last_good.scheme.gas;
                    write_field(&total, &gas, &diagnostics(&total, &gas)?, cfg.diagnostics, Format::Csv, &path, "last valid state")
                });
                if flushed.is_ok() {
                    report.files.push(path);
                }
            }
            return Err(e);
        }
        if let Some(dir) = &cfg.output_dir {
            if cfg.every.is_none() || stop == t_final {
                index += 1;
                report.files.extend(write_snapshot(cfg, &sim, dir, index)?);
            }
        }
        if cfg.verbose {
            eprintln!("t = {:.6e} after {} steps", sim.t, sim.steps);
        }
        last_good = sim.clone();
    }
    if let Some(dir) = &cfg.output_dir {
        if !cfg.sections.is_empty() {
            let total = sim.total()?;
            for (n, req) in cfg.sections.iter().enumerate() {
                let sec = cross_section(&total, &sim.scheme.gas, req.axis, req.coord, &req.variables)?;
                let path = dir.join(format!("section_{n}.csv"));
                fs::write(&path, sec.to_csv()).map_err(|e| Error::io(&path, e))?;
                report.files.push(path);
            }
        }
    }
    Ok(())
}

//! Command-line experiment driver.
//!
//! Settings come from built-in profile defaults, then an optional flat
//! `key = value` config file, then command-line flags.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::analysis::{analyze_decay, transient_cutoff, write_summary_csv, DecayReport};
use crate::kernel_check::{sampler_stats, scatter_isotropic_ensemble};
use crate::phase_function::{KernelError, ScatteringKernel};
use crate::presets::Preset;
use crate::sampling::{RandomStream, SamplingError};
use crate::theory::{diffusion_coefficient, predict, DiffusionPrediction, TheoryError};
use crate::transport::{default_workers, run_simulation_with_workers, write_tally_csv, SimulationConfig, SimulationError, TallyGrid};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Draws used by `verify-kernel`.
pub const VERIFY_DRAWS: usize = 1_000_000;
pub const VERIFY_BINS: usize = 50;
pub const VERIFY_P_VALUE: f64 = 1e-3;
/// `verify-kernel` bounds are this many standard errors `1/sqrt(N)`.
pub const VERIFY_SIGMAS: f64 = 4.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Preset name or inline `basis=...; coeffs=...` spec.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelChoice {
    Preset(Preset),
    Inline(ScatteringKernel),
}

impl KernelChoice {
    pub fn kernel(&self) -> ScatteringKernel {
        match self {
            KernelChoice::Preset(p) => p.kernel(),
            KernelChoice::Inline(k) => k.clone(),
        }
    }

    /// Filesystem-friendly label.
    pub fn label(&self) -> String {
        match self {
            KernelChoice::Preset(p) => p.name().to_string(),
            KernelChoice::Inline(_) => "inline".to_string(),
        }
    }
}

impl fmt::Display for KernelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelChoice::Preset(p) => write!(f, "{p} ({})", p.kernel()),
            KernelChoice::Inline(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for KernelChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains('=') {
            Ok(KernelChoice::Inline(s.parse()?))
        } else {
            s.parse::<Preset>().map(KernelChoice::Preset).map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// 10^7 particles on 1000 cells.
    Full,
    /// 10^6 particles on 200 cells.
    Fast,
}

impl FromStr for Profile {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(Profile::Full),
            "fast" => Ok(Profile::Fast),
            other => Err(CliError::Config(format!("unknown profile `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kernel: KernelChoice,
    pub sigma: f64,
    pub c: f64,
    pub n_particles: u64,
    pub n_cells: usize,
    /// `None` lets the predicted amplitude fall to 1/3 over the fit window.
    pub t_end: Option<f64>,
    pub census_dt: f64,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub tolerance: f64,
}

impl ExperimentConfig {
    pub fn with_profile(profile: Profile) -> Self {
        let (n_particles, n_cells) = match profile {
            Profile::Full => (10_000_000, 1000),
            Profile::Fast => (1_000_000, 200),
        };
        Self {
            kernel: KernelChoice::Preset(Preset::Isotropic),
            sigma: 10.0,
            c: 1.0,
            n_particles,
            n_cells,
            t_end: None,
            census_dt: 0.25,
            seed: 1,
            output_dir: PathBuf::from("anisoscat-out"),
            tolerance: 0.03,
        }
    }

    /// End time used for the run: the transient cutoff plus the time for the
    /// predicted amplitude to fall to 1/3, rounded up to a census.
    pub fn resolved_t_end(&self, prediction: &DiffusionPrediction) -> f64 {
        match self.t_end {
            Some(t) => t,
            None => {
                let t = transient_cutoff(self.sigma, self.c) + 3f64.ln() / prediction.decay_rate();
                (t / self.census_dt).ceil() * self.census_dt
            }
        }
    }

    pub fn simulation(&self, prediction: &DiffusionPrediction) -> SimulationConfig {
        SimulationConfig {
            kernel: self.kernel.kernel(),
            sigma: self.sigma,
            c: self.c,
            n_particles: self.n_particles,
            n_cells: self.n_cells,
            t_end: self.resolved_t_end(prediction),
            census_dt: self.census_dt,
            seed: self.seed,
        }
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
        where
            T::Err: fmt::Display,
        {
            value.trim().parse::<T>().map_err(|e| CliError::Config(format!("`{key}`: cannot parse `{value}`: {e}")))
        }
        match key {
            "kernel" => self.kernel = value.parse()?,
            "sigma" => self.sigma = num(key, value)?,
            "c" => self.c = num(key, value)?,
            "particles" => self.n_particles = num(key, value)?,
            "cells" => self.n_cells = num(key, value)?,
            "t_end" => self.t_end = Some(num(key, value)?),
            "census_dt" => self.census_dt = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "tolerance" => self.tolerance = num(key, value)?,
            "out" => self.output_dir = PathBuf::from(value.trim()),
            other => return Err(CliError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }
}

/// Parses flat `key = value` text; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", n + 1)))?;
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        if map.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key `{key}`", n + 1)));
        }
    }
    Ok(map)
}

#[derive(Debug, Parser)]
#[command(name = "anisoscat", version, about = "Monte Carlo transport with anisotropic scattering and its diffusion limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one kernel and compare the amplitude decay with diffusion theory.
    Run(ExperimentArgs),
    /// Check the cosine sampler of a kernel statistically.
    VerifyKernel(ExperimentArgs),
    /// Run over a list of sigma values (comma separated in --sigma); --kernel all runs every preset.
    Sweep(ExperimentArgs),
    /// Print the mean scattering cosine and diffusion coefficient of every preset.
    Tables,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub particles: Option<u64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub census_dt: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Config resolved from profile, file and flags, with the raw sigma and kernel strings kept for sweeps.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub sigma_list: Vec<f64>,
    pub kernel_list: Vec<KernelChoice>,
}

fn parse_sigma_list(s: &str) -> Result<Vec<f64>, CliError> {
    let list = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Config(format!("sigma `{v}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if list.is_empty() {
        return Err(CliError::Config("empty sigma list".into()));
    }
    Ok(list)
}

pub fn resolve(args: &ExperimentArgs) -> Result<Resolved, CliError> {
    let file = match &args.config {
        Some(path) => parse_config_text(&fs::read_to_string(path).map_err(io_err(path))?)?,
        None => BTreeMap::new(),
    };
    let profile = match (&args.profile, file.get("profile")) {
        (Some(p), _) => *p,
        (None, Some(p)) => p.parse()?,
        (None, None) => Profile::Full,
    };
    let mut config = ExperimentConfig::with_profile(profile);
    let mut sigma_text = None;
    let mut kernel_text = None;
    for (key, value) in &file {
        match key.as_str() {
            "profile" => {}
            "sigma" => sigma_text = Some(value.clone()),
            "kernel" => kernel_text = Some(value.clone()),
            _ => config.set(key, value)?,
        }
    }
    if let Some(v) = &args.sigma {
        sigma_text = Some(v.clone());
    }
    if let Some(v) = &args.kernel {
        kernel_text = Some(v.clone());
    }
    let sigma_list = match &sigma_text {
        Some(s) => parse_sigma_list(s)?,
        None => vec![config.sigma],
    };
    config.sigma = sigma_list[0];
    let kernel_list = match kernel_text.as_deref() {
        Some(k) if k.trim().eq_ignore_ascii_case("all") => Preset::ALL.into_iter().map(KernelChoice::Preset).collect(),
        Some(k) => vec![k.parse()?],
        None => vec![config.kernel.clone()],
    };
    config.kernel = kernel_list[0].clone();
    if let Some(v) = args.particles {
        config.n_particles = v;
    }
    if let Some(v) = args.cells {
        config.n_cells = v;
    }
    if let Some(v) = args.t_end {
        config.t_end = Some(v);
    }
    if let Some(v) = args.census_dt {
        config.census_dt = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.tolerance {
        config.tolerance = v;
    }
    if let Some(v) = &args.out {
        config.output_dir = v.clone();
    }
    Ok(Resolved { config, sigma_list, kernel_list })
}

/// Outcome of a single `run`.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub series: Vec<TallyGrid>,
    pub prediction: DiffusionPrediction,
    pub report: Option<DecayReport>,
}

impl RunOutcome {
    /// A run without decay fit (`t_end = 0`) passes trivially.
    pub fn pass(&self) -> bool {
        self.report.as_ref().is_none_or(|r| r.pass())
    }
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    Ok(BufWriter::new(fs::File::create(path).map_err(io_err(path))?))
}

/// Simulates, writes `tally.csv`, `summary.csv` and `report.txt` into the output directory.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<RunOutcome, CliError> {
    let kernel = config.kernel.kernel().prepared()?;
    let prediction = predict(&kernel, config.sigma, config.c)?;
    let sim = config.simulation(&prediction);
    sim.validate().map_err(SimulationError::from)?;
    let series = run_simulation_with_workers(&sim, workers)?;

    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let tally_path = dir.join("tally.csv");
    let mut out = create_file(&tally_path)?;
    write_tally_csv(&mut out, &series).and_then(|_| out.flush()).map_err(io_err(&tally_path))?;
    let summary_path = dir.join("summary.csv");
    let mut out = create_file(&summary_path)?;
    write_summary_csv(&mut out, &series, prediction.diffusion).and_then(|_| out.flush()).map_err(io_err(&summary_path))?;

    let report = (series.len() > 1).then(|| analyze_decay(&series, &prediction, config.sigma, config.tolerance));
    let report_path = dir.join("report.txt");
    let mut out = create_file(&report_path)?;
    let text = report_text(config, &sim, report.as_ref());
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(io_err(&report_path))?;
    Ok(RunOutcome { series, prediction, report })
}

fn report_text(config: &ExperimentConfig, sim: &SimulationConfig, report: Option<&DecayReport>) -> String {
    let mut text = format!(
        "kernel: {}\nsigma: {}\nc: {}\nparticles: {}\ncells: {}\nt_end: {}\ncensus_dt: {}\nseed: {}\n",
        config.kernel, sim.sigma, sim.c, sim.n_particles, sim.n_cells, sim.t_end, sim.census_dt, sim.seed
    );
    match report {
        Some(r) => text.push_str(&r.to_string()),
        None => text.push_str("single census: no decay fit\nresult: PASS\n"),
    }
    text
}

pub fn cmd_run(config: &ExperimentConfig) -> Result<i32, CliError> {
    let outcome = run_experiment(config, default_workers())?;
    let sim = config.simulation(&outcome.prediction);
    print!("{}", report_text(config, &sim, outcome.report.as_ref()));
    Ok(if outcome.pass() { EXIT_PASS } else { EXIT_FAIL })
}

/// Result of the statistical kernel check.
#[derive(Debug, Clone)]
pub struct KernelVerification {
    pub analytic_mean_cosine: f64,
    pub sampled_mean_cosine: f64,
    pub chi_square_p_value: f64,
    pub chi_square_statistic: f64,
    pub degrees_of_freedom: usize,
    /// `(<mu>, <xi>, <zeta>, <mu^2>)` after one scatter, for even kernels only.
    pub isotropy: Option<[f64; 4]>,
    pub bound: f64,
}

impl KernelVerification {
    pub fn mean_ok(&self) -> bool {
        (self.sampled_mean_cosine - self.analytic_mean_cosine).abs() <= self.bound
    }

    pub fn chi_square_ok(&self) -> bool {
        self.chi_square_p_value > VERIFY_P_VALUE
    }

    pub fn isotropy_ok(&self) -> bool {
        self.isotropy.is_none_or(|[x, y, z, xx]| {
            x.abs() <= self.bound && y.abs() <= self.bound && z.abs() <= self.bound && (xx - 1.0 / 3.0).abs() <= self.bound
        })
    }

    pub fn pass(&self) -> bool {
        self.mean_ok() && self.chi_square_ok() && self.isotropy_ok()
    }
}

impl fmt::Display for KernelVerification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
        writeln!(f, "analytic mean cosine: {:.15}", self.analytic_mean_cosine)?;
        writeln!(
            f,
            "sampled mean cosine: {:.6} (|diff| {:.2e}, bound {:.2e}) {}",
            self.sampled_mean_cosine,
            (self.sampled_mean_cosine - self.analytic_mean_cosine).abs(),
            self.bound,
            mark(self.mean_ok())
        )?;
        writeln!(
            f,
            "chi-square: {:.3} on {} dof, p = {:.4} {}",
            self.chi_square_statistic,
            self.degrees_of_freedom,
            self.chi_square_p_value,
            mark(self.chi_square_ok())
        )?;
        match self.isotropy {
            Some([x, y, z, xx]) => writeln!(
                f,
                "after one scatter of an isotropic ensemble: <mu> {x:.2e}, <xi> {y:.2e}, <zeta> {z:.2e}, <mu^2> {xx:.6} {}",
                mark(self.isotropy_ok())
            )?,
            None => writeln!(f, "isotropy check skipped (kernel has odd terms)")?,
        }
        write!(f, "result: {}", if self.pass() { "PASS" } else { "FAIL" })
    }
}

pub fn verify_kernel(kernel: &ScatteringKernel, draws: usize, seed: u64) -> Result<KernelVerification, CliError> {
    let kernel = kernel.prepared()?;
    let mut stream = RandomStream::new(seed, 0);
    let stats = sampler_stats(&kernel, draws, VERIFY_BINS, &mut stream)?;
    let isotropy = if kernel.is_even() {
        let m = scatter_isotropic_ensemble(&kernel, draws as u64, seed.wrapping_add(1))?;
        Some([m.mean_x, m.mean_y, m.mean_z, m.mean_x2])
    } else {
        None
    };
    Ok(KernelVerification {
        analytic_mean_cosine: kernel.mean_cosine(),
        sampled_mean_cosine: stats.mean_cosine,
        chi_square_p_value: stats.chi_square.p_value,
        chi_square_statistic: stats.chi_square.statistic,
        degrees_of_freedom: stats.chi_square.degrees_of_freedom,
        isotropy,
        bound: VERIFY_SIGMAS / (draws as f64).sqrt(),
    })
}

pub fn cmd_verify_kernel(config: &ExperimentConfig) -> Result<i32, CliError> {
    let v = verify_kernel(&config.kernel.kernel(), VERIFY_DRAWS, config.seed)?;
    println!("kernel: {}", config.kernel);
    println!("{v}");
    Ok(if v.pass() { EXIT_PASS } else { EXIT_FAIL })
}

/// One line of the sweep convergence table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub kernel: String,
    pub sigma: f64,
    pub theory_rate: f64,
    pub fitted_rate: f64,
    pub relative_error: f64,
    pub pass: bool,
}

/// Runs every kernel at every sigma; returns rows in (kernel, sigma) order.
pub fn sweep(base: &ExperimentConfig, kernels: &[KernelChoice], sigmas: &[f64], workers: usize) -> Result<Vec<SweepRow>, CliError> {
    let mut rows = Vec::new();
    for kernel in kernels {
        for &sigma in sigmas {
            let config = ExperimentConfig {
                kernel: kernel.clone(),
                sigma,
                output_dir: base.output_dir.join(kernel.label()).join(format!("sigma_{sigma}")),
                ..base.clone()
            };
            let outcome = run_experiment(&config, workers)?;
            let comparison = outcome.report.as_ref().and_then(|r| r.comparison);
            rows.push(SweepRow {
                kernel: kernel.label(),
                sigma,
                theory_rate: outcome.prediction.decay_rate(),
                fitted_rate: comparison.map_or(f64::NAN, |c| c.fitted_rate),
                relative_error: comparison.map_or(f64::NAN, |c| c.relative_error),
                pass: outcome.pass(),
            });
        }
    }
    Ok(rows)
}

/// True when the relative error does not increase with sigma, per kernel.
pub fn errors_monotone(rows: &[SweepRow]) -> bool {
    let mut by_kernel: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        by_kernel.entry(&r.kernel).or_default().push((r.sigma, r.relative_error));
    }
    by_kernel.values_mut().all(|v| {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        v.windows(2).all(|w| w[1].1 <= w[0].1)
    })
}

pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "kernel,sigma,theory_rate,fitted_rate,relative_error,pass")?;
    for r in rows {
        writeln!(out, "{},{},{:.16e},{:.16e},{:.16e},{}", r.kernel, r.sigma, r.theory_rate, r.fitted_rate, r.relative_error, r.pass)?;
    }
    Ok(())
}

pub fn cmd_sweep(resolved: &Resolved) -> Result<i32, CliError> {
    let rows = sweep(&resolved.config, &resolved.kernel_list, &resolved.sigma_list, default_workers())?;
    let dir = &resolved.config.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join("convergence.csv");
    let mut out = create_file(&path)?;
    write_convergence_csv(&mut out, &rows).and_then(|_| out.flush()).map_err(io_err(&path))?;
    write_convergence_csv(io::stdout().lock(), &rows).map_err(io_err(&path))?;
    println!("relative error non-increasing in sigma: {}", errors_monotone(&rows));
    Ok(if rows.iter().all(|r| r.pass) { EXIT_PASS } else { EXIT_FAIL })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub preset: Preset,
    pub g_bar: f64,
    /// `D sigma / c`.
    pub diffusion_over_c_per_sigma: f64,
}

pub fn table_rows() -> Result<Vec<TableRow>, CliError> {
    Preset::ALL
        .into_iter()
        .map(|preset| {
            let g_bar = preset.kernel().normalize()?.mean_cosine();
            let diffusion_over_c_per_sigma = diffusion_coefficient(1.0, 1.0, g_bar)?;
            Ok(TableRow { preset, g_bar, diffusion_over_c_per_sigma })
        })
        .collect()
}

fn as_fraction(value: f64) -> String {
    for (v, s) in [(0.0, "0"), (1.0 / 3.0, "1/3"), (-1.0 / 3.0, "-1/3")] {
        if (value - v).abs() <= 1e-14 {
            return s.to_string();
        }
    }
    format!("{value:.15}")
}

fn diffusion_label(d: f64) -> String {
    let k = 1.0 / d;
    if ((k - k.round()) / k).abs() <= 1e-14 {
        format!("c/{}sigma", k.round())
    } else {
        format!("{d:.15} c/sigma")
    }
}

pub fn write_tables<W: Write>(mut out: W, rows: &[TableRow]) -> io::Result<()> {
    writeln!(out, "{:<10} {:<58} {:<8} {}", "symbol", "kernel", "g_bar", "D")?;
    for r in rows {
        writeln!(
            out,
            "{:<10} {:<58} {:<8} {}",
            r.preset.name(),
            r.preset.kernel().to_string(),
            as_fraction(r.g_bar),
            diffusion_label(r.diffusion_over_c_per_sigma)
        )?;
    }
    Ok(())
}

pub fn cmd_tables() -> Result<i32, CliError> {
    let rows = table_rows()?;
    write_tables(io::stdout().lock(), &rows).map_err(io_err(Path::new("<stdout>")))?;
    Ok(EXIT_PASS)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Tables => cmd_tables(),
        Command::Run(args) => cmd_run(&resolve(&args)?.config),
        Command::VerifyKernel(args) => cmd_verify_kernel(&resolve(&args)?.config),
        Command::Sweep(args) => cmd_sweep(&resolve(&args)?),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

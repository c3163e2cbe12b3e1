//! Analog Monte Carlo transport in the periodic slab `[-2, 2)` with pure
//! scattering, tallied at census times.
//!
//! Histories are independent: history `i` draws every random number from
//! `RandomStream::new(seed, i)` and is followed through all censuses before
//! the next history starts. Each tally contribution is quantized to 2^-56
//! and summed as an integer, so merging worker accumulators is exact and the
//! result does not depend on how histories are split between workers.
//! Particle weights must stay below 64.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::phase_function::ScatteringKernel;
use crate::sampling::{rotate_direction, sample_azimuth, sample_isotropic, CosineSampler, Direction, RandomStream, SamplingError};

pub const DOMAIN_MIN: f64 = -2.0;
pub const DOMAIN_MAX: f64 = 2.0;
pub const DOMAIN_LENGTH: f64 = DOMAIN_MAX - DOMAIN_MIN;
/// Integral of `10 + 5 sin(pi x / 2)` over the slab.
pub const TOTAL_WEIGHT: f64 = 40.0;
/// Constant envelope for rejection sampling of the initial density.
pub const POSITION_ENVELOPE: f64 = 15.0;
/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "ANISOSCAT_THREADS";

// 2^56: per-particle contributions |w mu^k| <= w < 64 fit an i64
const FIXED_SCALE: f64 = 72_057_594_037_927_936.0;
const HISTORY_CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("sigma must be positive, got {0}")]
    Sigma(f64),
    #[error("particle speed c must be positive, got {0}")]
    Speed(f64),
    #[error("need at least one particle")]
    Particles,
    #[error("need at least 2 cells, got {0}")]
    Cells(usize),
    #[error("census_dt must be positive, got {0}")]
    CensusDt(f64),
    #[error("t_end must be finite and non-negative, got {0}")]
    TEnd(f64),
    #[error("census_dt {census_dt} exceeds t_end {t_end}")]
    CensusAfterEnd { census_dt: f64, t_end: f64 },
}

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub kernel: ScatteringKernel,
    pub sigma: f64,
    pub c: f64,
    pub n_particles: u64,
    pub n_cells: usize,
    pub t_end: f64,
    pub census_dt: f64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(ConfigError::Sigma(self.sigma));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(ConfigError::Speed(self.c));
        }
        if self.n_particles == 0 {
            return Err(ConfigError::Particles);
        }
        if self.n_cells < 2 {
            return Err(ConfigError::Cells(self.n_cells));
        }
        if !(self.census_dt > 0.0 && self.census_dt.is_finite()) {
            return Err(ConfigError::CensusDt(self.census_dt));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(ConfigError::TEnd(self.t_end));
        }
        // t_end = 0 asks for the initial tally only
        if self.t_end > 0.0 && self.census_dt > self.t_end {
            return Err(ConfigError::CensusAfterEnd { census_dt: self.census_dt, t_end: self.t_end });
        }
        Ok(())
    }

    /// `0, dt, 2 dt, ...` up to `t_end`, with `t_end` appended when it is not a multiple of `dt`.
    pub fn census_times(&self) -> Vec<f64> {
        let steps = (self.t_end / self.census_dt * (1.0 + 1e-12)).floor() as usize;
        let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * self.census_dt).collect();
        let last = *times.last().unwrap();
        if self.t_end - last > 1e-9 * self.census_dt {
            times.push(self.t_end);
        } else if let Some(t) = times.last_mut() {
            *t = self.t_end;
        }
        times
    }

    pub fn particle_weight(&self) -> f64 {
        TOTAL_WEIGHT / self.n_particles as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: f64,
    pub dir: Direction,
    pub weight: f64,
    pub t: f64,
}

impl Particle {
    /// Straight-line flight of `distance` along `dir`, wrapped into the slab.
    #[inline]
    pub fn fly(&mut self, distance: f64) {
        self.x = apply_periodic(self.x + self.dir.x * distance);
    }
}

/// Maps `x` into `[-2, 2)` modulo the slab length.
#[inline]
pub fn apply_periodic(x: f64) -> f64 {
    if (DOMAIN_MIN..DOMAIN_MAX).contains(&x) {
        return x;
    }
    // single wraps are exact (Sterbenz)
    let y = if (DOMAIN_MAX..DOMAIN_MAX + DOMAIN_LENGTH).contains(&x) {
        x - DOMAIN_LENGTH
    } else if (DOMAIN_MIN - DOMAIN_LENGTH..DOMAIN_MIN).contains(&x) {
        x + DOMAIN_LENGTH
    } else {
        (x - DOMAIN_MIN).rem_euclid(DOMAIN_LENGTH) + DOMAIN_MIN
    };
    if y >= DOMAIN_MAX {
        DOMAIN_MIN
    } else {
        y
    }
}

/// Unnormalized initial density `10 + 5 sin(pi x / 2)`.
pub fn initial_density(x: f64) -> f64 {
    10.0 + 5.0 * (0.5 * PI * x).sin()
}

/// First draws of a history: position by rejection under the envelope, then an isotropic direction.
pub fn initial_particle(stream: &mut RandomStream, weight: f64) -> Particle {
    let x = loop {
        let x = DOMAIN_MIN + DOMAIN_LENGTH * stream.uniform();
        let y = POSITION_ENVELOPE * stream.uniform();
        if y <= initial_density(x) {
            break x;
        }
    };
    Particle { x, dir: sample_isotropic(stream), weight, t: 0.0 }
}

pub fn sample_initial_ensemble(config: &SimulationConfig) -> Vec<Particle> {
    let weight = config.particle_weight();
    (0..config.n_particles)
        .map(|i| initial_particle(&mut RandomStream::new(config.seed, i), weight))
        .collect()
}

/// Scattering medium seen by a history: cross section, speed, and kernel sampler.
#[derive(Debug, Clone)]
pub struct Medium {
    pub sigma: f64,
    pub c: f64,
    pub sampler: CosineSampler,
}

impl Medium {
    pub fn new(kernel: &ScatteringKernel, sigma: f64, c: f64) -> Result<Self, SamplingError> {
        Ok(Self { sigma, c, sampler: CosineSampler::new(kernel)? })
    }
}

/// Follows `p` until `t_census`, stopping mid-flight at the census.
pub fn advance_particle(
    p: &mut Particle,
    t_census: f64,
    medium: &Medium,
    stream: &mut RandomStream,
) -> Result<(), SamplingError> {
    while p.t < t_census {
        let path = -stream.uniform_open_low().ln() / medium.sigma;
        let reach = medium.c * (t_census - p.t);
        if path >= reach {
            p.fly(reach);
            p.t = t_census;
            break;
        }
        p.fly(path);
        p.t += path / medium.c;
        let mu = medium.sampler.sample(stream)?;
        let phi = sample_azimuth(stream);
        p.dir = rotate_direction(p.dir, mu, phi);
    }
    Ok(())
}

#[inline]
fn to_fixed(v: f64) -> i64 {
    (v * FIXED_SCALE) as i64
}

#[inline]
fn from_fixed(v: i64) -> f64 {
    v as f64 / FIXED_SCALE
}

/// Fixed-point sums for one cell; integer addition keeps merges order-independent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[repr(align(32))]
struct CellSums {
    weight: i64,
    weight_mu: i64,
    weight_mu2: i64,
    count: u64,
}

/// Census tallies on a uniform grid over `[-2, 2]`.
///
/// Sums are held in fixed point with `FIXED_SCALE` units; all weight in a run
/// totals `TOTAL_WEIGHT`, far below the `i64` range.
#[derive(Debug, Clone, PartialEq)]
pub struct TallyGrid {
    time_bits: u64,
    inv_width: f64,
    cells: Vec<CellSums>,
}

impl TallyGrid {
    pub fn new(n_cells: usize, time: f64) -> Self {
        Self {
            time_bits: time.to_bits(),
            inv_width: n_cells as f64 / DOMAIN_LENGTH,
            cells: vec![CellSums::default(); n_cells],
        }
    }

    pub fn time(&self) -> f64 {
        f64::from_bits(self.time_bits)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_width(&self) -> f64 {
        DOMAIN_LENGTH / self.n_cells() as f64
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        DOMAIN_MIN + (i as f64 + 0.5) * self.cell_width()
    }

    pub fn cell_index(&self, x: f64) -> usize {
        let i = ((x - DOMAIN_MIN) * self.inv_width).floor();
        (i.max(0.0) as usize).min(self.n_cells() - 1)
    }

    /// Index of the cell whose center is nearest `x` (periodic).
    pub fn nearest_cell(&self, x: f64) -> usize {
        let i = ((apply_periodic(x) - DOMAIN_MIN) / self.cell_width() - 0.5).round();
        (i as i64).rem_euclid(self.n_cells() as i64) as usize
    }

    #[inline]
    pub fn add(&mut self, p: &Particle) {
        let i = self.cell_index(p.x);
        let mu = p.dir.x;
        let cell = &mut self.cells[i];
        cell.weight += to_fixed(p.weight);
        cell.weight_mu += to_fixed(p.weight * mu);
        cell.weight_mu2 += to_fixed(p.weight * mu * mu);
        cell.count += 1;
    }

    pub fn merge(&mut self, other: &TallyGrid) {
        assert_eq!(self.n_cells(), other.n_cells(), "tally grids differ in size");
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            a.weight += b.weight;
            a.weight_mu += b.weight_mu;
            a.weight_mu2 += b.weight_mu2;
            a.count += b.count;
        }
    }

    pub fn weight_sum(&self, i: usize) -> f64 {
        from_fixed(self.cells[i].weight)
    }

    pub fn weight_mu_sum(&self, i: usize) -> f64 {
        from_fixed(self.cells[i].weight_mu)
    }

    pub fn weight_mu2_sum(&self, i: usize) -> f64 {
        from_fixed(self.cells[i].weight_mu2)
    }

    pub fn count(&self, i: usize) -> u64 {
        self.cells[i].count
    }

    pub fn rho(&self, i: usize) -> f64 {
        self.weight_sum(i) / self.cell_width()
    }

    pub fn jx(&self, i: usize) -> f64 {
        self.weight_mu_sum(i) / self.cell_width()
    }

    pub fn jxx(&self, i: usize) -> f64 {
        self.weight_mu2_sum(i) / self.cell_width()
    }

    /// Estimated variance of `rho(i)`, treating the cell population as Poisson.
    pub fn rho_variance(&self, i: usize) -> f64 {
        match self.cells[i].count {
            0 => 0.0,
            n => self.rho(i).powi(2) / n as f64,
        }
    }

    /// Exact fixed-point total weight over all cells.
    pub fn total_weight_fixed(&self) -> i64 {
        self.cells.iter().map(|c| c.weight).sum()
    }

    pub fn total_weight(&self) -> f64 {
        from_fixed(self.total_weight_fixed())
    }

    pub fn total_count(&self) -> u64 {
        self.cells.iter().map(|c| c.count).sum()
    }

    pub fn rho_profile(&self) -> Vec<f64> {
        (0..self.n_cells()).map(|i| self.rho(i)).collect()
    }
}

/// Tallies a census-synchronized set of particles.
pub fn tally(particles: &[Particle], mut grid: TallyGrid) -> TallyGrid {
    for p in particles {
        grid.add(p);
    }
    grid
}

/// Worker count: available parallelism, capped by `ANISOSCAT_THREADS`.
pub fn default_workers() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap > 0 => available.min(cap),
        _ => available,
    }
}

pub fn run_simulation(config: &SimulationConfig) -> Result<Vec<TallyGrid>, SimulationError> {
    run_simulation_with_workers(config, default_workers())
}

/// Runs all histories on `workers` threads and returns one tally per census time.
pub fn run_simulation_with_workers(config: &SimulationConfig, workers: usize) -> Result<Vec<TallyGrid>, SimulationError> {
    config.validate()?;
    let medium = Medium::new(&config.kernel, config.sigma, config.c)?;
    let times = config.census_times();
    let weight = config.particle_weight();
    let n_chunks = config.n_particles.div_ceil(HISTORY_CHUNK);
    let workers = workers.max(1).min(n_chunks as usize);
    let next_chunk = AtomicU64::new(0);
    let failure: Mutex<Option<SamplingError>> = Mutex::new(None);

    let empty = || times.iter().map(|&t| TallyGrid::new(config.n_cells, t)).collect::<Vec<_>>();
    let run_worker = || {
        let mut tallies = empty();
        loop {
            let chunk = next_chunk.fetch_add(1, Ordering::Relaxed);
            if chunk >= n_chunks || failure.lock().unwrap().is_some() {
                break;
            }
            let end = ((chunk + 1) * HISTORY_CHUNK).min(config.n_particles);
            // census-major within a chunk keeps one grid hot at a time; each
            // history still draws from its own stream in the same order
            let mut histories: Vec<(Particle, RandomStream)> = (chunk * HISTORY_CHUNK..end)
                .map(|history| {
                    let mut stream = RandomStream::new(config.seed, history);
                    (initial_particle(&mut stream, weight), stream)
                })
                .collect();
            for (grid, &t) in tallies.iter_mut().zip(&times) {
                for (p, stream) in histories.iter_mut() {
                    if let Err(e) = advance_particle(p, t, &medium, stream) {
                        failure.lock().unwrap().get_or_insert(e);
                        return tallies;
                    }
                    grid.add(p);
                }
            }
        }
        tallies
    };

    let partials: Vec<Vec<TallyGrid>> = if workers == 1 {
        vec![run_worker()]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers).map(|_| scope.spawn(run_worker)).collect();
            handles.into_iter().map(|h| h.join().expect("transport worker panicked")).collect()
        })
    };
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e.into());
    }
    let mut merged = empty();
    for part in &partials {
        for (m, p) in merged.iter_mut().zip(part) {
            m.merge(p);
        }
    }
    Ok(merged)
}

/// Writes `t,cell_center,rho,jx,jxx` rows with 17 significant digits.
pub fn write_tally_csv<W: Write>(mut out: W, series: &[TallyGrid]) -> io::Result<()> {
    writeln!(out, "t,cell_center,rho,jx,jxx")?;
    for grid in series {
        let t = grid.time();
        for i in 0..grid.n_cells() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t,
                grid.cell_center(i),
                grid.rho(i),
                grid.jx(i),
                grid.jxx(i)
            )?;
        }
    }
    Ok(())
}

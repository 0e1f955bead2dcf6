//! The one-dimensional exclusion lattice with isolated and grouped agents.
//!
//! Two views of the same process: the deterministic mean-field map for site
//! occupancies and a stochastic agent simulation with random sequential
//! updates. Sites outside the lattice count as vacant when an agent's class
//! is decided, but nothing can move or be placed into them, so the ends act
//! as reflecting walls and movement conserves the total occupancy.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::write_csv_file;
use crate::model::ModelParams;
use crate::pde::{fit_speed, front_position, FrontTrace, PdeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("`{name}` = {value} is not a probability")]
    NotAProbability { name: &'static str, value: f64 },
    #[error("`{name}` must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("the mean-field stencil needs at least 5 sites, got {0}")]
    TooFewSites(usize),
    #[error("occupancy {value} at site {site} is outside [0, 1]")]
    OccupancyOutOfRange { site: usize, value: f64 },
    #[error("{0}")]
    Front(#[from] PdeError),
}

/// Per-step event probabilities plus the lattice spacing and time step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub p_m_i: f64,
    pub p_m_g: f64,
    pub p_p_i: f64,
    pub p_p_g: f64,
    pub p_d_i: f64,
    pub p_d_g: f64,
    pub delta: f64,
    pub tau: f64,
}

/// Continuum rates together with any smallness warnings.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuumLimit {
    pub params: ModelParams,
    pub warnings: Vec<String>,
}

/// Proliferation and death probabilities above this break the small-`tau`
/// assumption behind the continuum limit.
pub const SMALL_PROBABILITY: f64 = 0.1;

impl LatticeParams {
    pub fn validate(&self) -> Result<(), LatticeError> {
        for (name, value) in self.probabilities() {
            if !(0.0..=1.0).contains(&value) {
                return Err(LatticeError::NotAProbability { name, value });
            }
        }
        for (name, value) in [("delta", self.delta), ("tau", self.tau)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(LatticeError::NonPositive { name, value });
            }
        }
        Ok(())
    }

    fn probabilities(&self) -> [(&'static str, f64); 6] {
        [
            ("p_m_i", self.p_m_i),
            ("p_m_g", self.p_m_g),
            ("p_p_i", self.p_p_i),
            ("p_p_g", self.p_p_g),
            ("p_d_i", self.p_d_i),
            ("p_d_g", self.p_d_g),
        ]
    }

    /// `D = P_m delta^2 / (2 tau)`, `lambda = P_p / tau`, `K = P_d / tau`.
    pub fn continuum_limit_map(&self) -> Result<ContinuumLimit, LatticeError> {
        self.validate()?;
        let diff = self.delta * self.delta / (2.0 * self.tau);
        let params = ModelParams {
            d_i: self.p_m_i * diff,
            d_g: self.p_m_g * diff,
            lambda_i: self.p_p_i / self.tau,
            lambda_g: self.p_p_g / self.tau,
            k_i: self.p_d_i / self.tau,
            k_g: self.p_d_g / self.tau,
        };
        let warnings = self.probabilities()[2..]
            .iter()
            .filter(|(_, p)| *p > SMALL_PROBABILITY)
            .map(|(name, p)| format!("{name} = {p} exceeds {SMALL_PROBABILITY}; the continuum limit assumes it is O(tau)"))
            .collect();
        Ok(ContinuumLimit { params, warnings })
    }

    /// Inverse of [`continuum_limit_map`](Self::continuum_limit_map) for a
    /// fixed spacing and time step.
    pub fn from_continuum(params: &ModelParams, delta: f64, tau: f64) -> Result<Self, LatticeError> {
        let diff = delta * delta / (2.0 * tau);
        let p = Self {
            p_m_i: params.d_i / diff,
            p_m_g: params.d_g / diff,
            p_p_i: params.lambda_i * tau,
            p_p_g: params.lambda_g * tau,
            p_d_i: params.k_i * tau,
            p_d_g: params.k_g * tau,
            delta,
            tau,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldState {
    pub occupancy: Vec<f64>,
    pub time: f64,
    /// Site updates that had to be clamped back into `[0, 1]`.
    pub clamped: usize,
    pub updates: usize,
}

/// Fraction of clamped site updates above which a run is invalid.
pub const CLAMP_TOLERANCE: f64 = 1e-3;

impl MeanFieldState {
    pub fn new(occupancy: Vec<f64>) -> Result<Self, LatticeError> {
        if occupancy.len() < 5 {
            return Err(LatticeError::TooFewSites(occupancy.len()));
        }
        if let Some((site, &value)) = occupancy.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(LatticeError::OccupancyOutOfRange { site, value });
        }
        Ok(Self {
            occupancy,
            time: 0.0,
            clamped: 0,
            updates: 0,
        })
    }

    pub fn invalid(&self) -> bool {
        self.clamped as f64 > CLAMP_TOLERANCE * self.updates as f64
    }

    pub fn total(&self) -> f64 {
        self.occupancy.iter().sum()
    }
}

/// Rate of a directed event from a site whose target neighbour is vacant with
/// probability `1 - target` and whose other neighbour is `behind`: the agent
/// is isolated iff `behind` is also vacant.
#[inline]
fn directed(u: f64, target: f64, behind: f64, p_isolated: f64, p_grouped: f64) -> f64 {
    0.5 * u * (1.0 - target) * (p_grouped + (p_isolated - p_grouped) * (1.0 - behind))
}

/// Occupancy change `delta U_j` of one mean-field step.
pub fn mean_field_increment(u: &[f64], params: &LatticeParams) -> Vec<f64> {
    let n = u.len();
    let at = |k: isize| if k < 0 || k >= n as isize { 0.0 } else { u[k as usize] };
    let p = params;
    // Events leaving site k to the right / left. Nothing leaves through a wall.
    let right = |k: usize, pi: f64, pg: f64| {
        let k = k as isize;
        if k == n as isize - 1 {
            0.0
        } else {
            directed(at(k), at(k + 1), at(k - 1), pi, pg)
        }
    };
    let left = |k: usize, pi: f64, pg: f64| {
        let k = k as isize;
        if k == 0 {
            0.0
        } else {
            directed(at(k), at(k - 1), at(k + 1), pi, pg)
        }
    };
    (0..n)
        .map(|j| {
            let mut du = 0.0;
            for (pi, pg, moves) in [(p.p_m_i, p.p_m_g, true), (p.p_p_i, p.p_p_g, false)] {
                if j > 0 {
                    du += right(j - 1, pi, pg);
                }
                if j + 1 < n {
                    du += left(j + 1, pi, pg);
                }
                if moves {
                    du -= right(j, pi, pg) + left(j, pi, pg);
                }
            }
            let jj = j as isize;
            let isolated = (1.0 - at(jj - 1)) * (1.0 - at(jj + 1));
            du - u[j] * (p.p_d_g + (p.p_d_i - p.p_d_g) * isolated)
        })
        .collect()
}

/// One synchronous step of the mean-field map. Values pushed outside
/// `[0, 1]` are clamped and counted.
pub fn mean_field_step(state: &MeanFieldState, params: &LatticeParams) -> MeanFieldState {
    let du = mean_field_increment(&state.occupancy, params);
    let mut clamped = state.clamped;
    let occupancy = state
        .occupancy
        .iter()
        .zip(&du)
        .map(|(u, d)| {
            let v = u + d;
            if (0.0..=1.0).contains(&v) {
                v
            } else {
                clamped += 1;
                v.clamp(0.0, 1.0)
            }
        })
        .collect::<Vec<_>>();
    MeanFieldState {
        updates: state.updates + occupancy.len(),
        occupancy,
        time: state.time + params.tau,
        clamped,
    }
}

/// Exclusion lattice of agents with its own seeded generator.
#[derive(Clone, Debug)]
pub struct AgentLattice {
    occupied: Vec<bool>,
    pub rng_seed: u64,
    /// Completed sweeps.
    pub time: u64,
    rng: ChaCha8Rng,
    /// Sites `0..packed` are known to be occupied.
    packed: usize,
    /// No site at or beyond `extent` is occupied.
    extent: usize,
}

impl AgentLattice {
    pub fn new(occupied: Vec<bool>, rng_seed: u64) -> Self {
        Self::with_stream(occupied, rng_seed, 0)
    }

    /// Independent generator stream `stream` for the same seed, used to give
    /// every ensemble member its own reproducible sequence.
    pub fn with_stream(occupied: Vec<bool>, rng_seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_stream(stream);
        let extent = occupied.iter().rposition(|&o| o).map_or(0, |k| k + 1);
        Self {
            occupied,
            rng_seed,
            time: 0,
            rng,
            packed: 0,
            extent,
        }
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn agents(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    fn vacant(&self, k: isize) -> bool {
        k < 0 || k >= self.occupied.len() as isize || !self.occupied[k as usize]
    }

    fn free(&self, k: isize) -> bool {
        k >= 0 && (k as usize) < self.occupied.len() && !self.occupied[k as usize]
    }

    pub fn is_isolated(&self, site: usize) -> bool {
        let k = site as isize;
        self.vacant(k - 1) && self.vacant(k + 1)
    }

    fn class_probability(&self, site: usize, isolated: f64, grouped: f64) -> f64 {
        if self.is_isolated(site) {
            isolated
        } else {
            grouped
        }
    }

    fn direction(&mut self) -> isize {
        if self.rng.gen::<bool>() {
            1
        } else {
            -1
        }
    }

    /// Move, proliferation and death attempts of the agent at `site`.
    /// Returns the sites vacated, in order.
    fn visit(&mut self, mut site: usize, p: &LatticeParams) -> [Option<usize>; 2] {
        let mut vacated = [None, None];
        if self.rng.gen::<f64>() < self.class_probability(site, p.p_m_i, p.p_m_g) {
            let target = site as isize + self.direction();
            if self.free(target) {
                self.occupied[site] = false;
                vacated[0] = Some(site);
                site = target as usize;
                self.occupied[site] = true;
                self.extent = self.extent.max(site + 1);
            }
        }
        if self.rng.gen::<f64>() < self.class_probability(site, p.p_p_i, p.p_p_g) {
            let target = site as isize + self.direction();
            if self.free(target) {
                self.occupied[target as usize] = true;
                self.extent = self.extent.max(target as usize + 1);
            }
        }
        if self.rng.gen::<f64>() < self.class_probability(site, p.p_d_i, p.p_d_g) {
            self.occupied[site] = false;
            vacated[1] = Some(site);
        }
        vacated
    }

    /// One sweep of random sequential updates.
    ///
    /// Every agent present at the start of the sweep is visited once in a
    /// random order and attempts, in turn, a move, a proliferation and
    /// death, each with the probability for its class at that moment.
    /// Daughters placed during the sweep are not visited until the next one.
    ///
    /// The order is realised by giving each agent an independent uniform
    /// visit time. When grouped agents cannot die, agents inside the packed
    /// block at the left wall can do nothing until a vacancy reaches them, so
    /// their visit times are only drawn at that moment; a time already in
    /// the past means the visit was a no-op. This leaves the law of the
    /// sweep unchanged while the cost scales with the number of agents near
    /// the front.
    pub fn step(&mut self, p: &LatticeParams) {
        let n = self.occupied.len();
        let lo = self.packed + self.occupied[self.packed..].iter().position(|&o| !o).unwrap_or(n - self.packed);
        // Agents in 0..pending have not been scheduled yet.
        let mut pending = if p.p_d_g == 0.0 { lo.saturating_sub(1) } else { 0 };
        let mut queue = BinaryHeap::new();
        let mut sites = Vec::new();
        for k in pending..self.extent {
            if self.occupied[k] {
                queue.push(Reverse((self.rng.gen::<f64>().to_bits(), sites.len())));
                sites.push(k);
            }
        }
        while let Some(Reverse((bits, id))) = queue.pop() {
            let now = f64::from_bits(bits);
            for vacated in self.visit(sites[id], p).into_iter().flatten() {
                if pending > 0 && vacated == pending {
                    pending -= 1;
                    let t = self.rng.gen::<f64>();
                    if t > now {
                        queue.push(Reverse((t.to_bits(), sites.len())));
                        sites.push(pending);
                    }
                }
            }
        }
        self.packed = pending;
        self.time += 1;
    }
}

/// Alias of [`AgentLattice::step`].
pub fn stochastic_step(lattice: &mut AgentLattice, params: &LatticeParams) {
    lattice.step(params);
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub runs: usize,
    pub sites: usize,
    /// Sites `0..filled` start occupied, the rest vacant.
    pub filled: usize,
    pub steps: usize,
    pub snapshot_every: usize,
    pub seed: u64,
}

/// Column-averaged occupancy over an ensemble of independent runs.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleAverage {
    /// Site positions `k * delta`.
    pub x: Vec<f64>,
    /// Model times `step * tau` of the snapshots.
    pub times: Vec<f64>,
    pub mean: Vec<Vec<f64>>,
    pub stderr: Vec<Vec<f64>>,
    pub runs: usize,
}

fn snapshot_steps(config: &EnsembleConfig) -> Vec<usize> {
    let every = config.snapshot_every.max(1);
    let mut steps: Vec<usize> = (0..=config.steps).step_by(every).collect();
    if steps.last() != Some(&config.steps) {
        steps.push(config.steps);
    }
    steps
}

/// Runs the ensemble in parallel; run `r` uses generator stream `r` of
/// `config.seed`, so the result does not depend on the thread count.
pub fn run_ensemble(params: &LatticeParams, config: &EnsembleConfig) -> Result<EnsembleAverage, LatticeError> {
    params.validate()?;
    let steps = snapshot_steps(config);
    let initial: Vec<bool> = (0..config.sites).map(|k| k < config.filled).collect();
    let counts = (0..config.runs)
        .into_par_iter()
        .map(|run| {
            let mut lattice = AgentLattice::with_stream(initial.clone(), config.seed, run as u64);
            let mut counts = vec![vec![0u32; config.sites]; steps.len()];
            let mut next = 0;
            for step in 0..=config.steps {
                if step > 0 {
                    lattice.step(params);
                }
                if steps[next] == step {
                    for (c, &o) in counts[next].iter_mut().zip(lattice.occupied()) {
                        *c += u32::from(o);
                    }
                    next += 1;
                    if next == steps.len() {
                        break;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![vec![0u32; config.sites]; steps.len()],
            |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(&b) {
                    for (x, y) in ra.iter_mut().zip(rb) {
                        *x += y;
                    }
                }
                a
            },
        );
    let r = config.runs as f64;
    let mean: Vec<Vec<f64>> = counts.iter().map(|row| row.iter().map(|&c| f64::from(c) / r).collect()).collect();
    // Occupancies are 0/1, so the sample variance is m (1 - m) r / (r - 1).
    let stderr = mean
        .iter()
        .map(|row| {
            row.iter()
                .map(|&m| if config.runs > 1 { (m * (1.0 - m) / (r - 1.0)).sqrt() } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(EnsembleAverage {
        x: (0..config.sites).map(|k| k as f64 * params.delta).collect(),
        times: steps.iter().map(|&s| s as f64 * params.tau).collect(),
        mean,
        stderr,
        runs: config.runs,
    })
}

impl EnsembleAverage {
    /// Position of the `level` crossing of the mean occupancy per snapshot,
    /// with the speed fitted over the last half of the series.
    pub fn front(&self, level: f64) -> Result<FrontTrace, LatticeError> {
        let samples = self
            .times
            .iter()
            .zip(&self.mean)
            .map(|(&t, row)| {
                front_position(&self.x, row, level)
                    .map(|l| (t, l))
                    .ok_or(PdeError::NoFront { threshold: level, time: t })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(fit_speed(samples, level, 0.5)?)
    }

    /// Writes snapshot `index` as CSV with columns `x, mean_occupancy, stderr`.
    pub fn write_csv(&self, path: &Path, index: usize) -> std::io::Result<()> {
        write_csv_file(path, &["x", "mean_occupancy", "stderr"], &[&self.x, &self.mean[index], &self.stderr[index]])
    }
}

/// Writes occupancies as CSV with columns `site_index, x, occupancy`.
pub fn write_occupancy_csv(path: &Path, occupancy: &[f64], delta: f64) -> std::io::Result<()> {
    let idx: Vec<f64> = (0..occupancy.len()).map(|k| k as f64).collect();
    let x: Vec<f64> = idx.iter().map(|k| k * delta).collect();
    write_csv_file(path, &["site_index", "x", "occupancy"], &[&idx, &x, occupancy])
}

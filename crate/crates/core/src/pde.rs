//! Explicit finite-difference solver for `U_t = (D(U) U_x)_x + R(U)` on a
//! bounded interval with no-flux ends, plus front tracking and speed fits.
//!
//! The scheme is conservative: both boundary fluxes are zero and the reaction
//! term is added pointwise. By default the interface flux is the difference
//! of the diffusion potential `Phi(u) = int_0^u D`, which keeps the
//! semi-discrete system bounded inside negative-diffusivity bands, and time
//! stepping is classical RK4 at a fixed step. Forward-backward diffusion has
//! no classical stability bound, so the usual explicit limit is only checked
//! and reported as a warning.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::Model;
use crate::poly::fit_line;

/// Leading-edge level used to locate fronts.
pub const FRONT_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid initial condition: {0}")]
    InvalidInitialCondition(String),
    #[error("solution blew up at t = {time}")]
    BlowUp { time: f64 },
    #[error("no front below {threshold} at t = {time}; the domain is too short")]
    NoFront { threshold: f64, time: f64 },
    #[error("trajectory has too few snapshots to fit a speed")]
    TooFewSnapshots,
    #[error("time {0} is outside the trajectory")]
    TimeOutOfRange(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x0: f64,
    pub x1: f64,
    pub dx: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl Default for Grid1D {
    fn default() -> Self {
        Self {
            x0: 0.0,
            x1: 100.0,
            dx: 0.1,
            dt: 0.01,
            n_steps: 5000,
        }
    }
}

impl Grid1D {
    pub fn new(x0: f64, x1: f64, dx: f64, dt: f64, t_end: f64) -> Result<Self, PdeError> {
        let grid = Self {
            x0,
            x1,
            dx,
            dt,
            n_steps: (t_end / dt).round() as usize,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        if !(self.dx > 0.0) || !(self.dt > 0.0) {
            return Err(PdeError::InvalidGrid(format!("dx = {}, dt = {} must be positive", self.dx, self.dt)));
        }
        if !(self.x1 > self.x0) {
            return Err(PdeError::InvalidGrid(format!("empty domain [{}, {}]", self.x0, self.x1)));
        }
        if self.nodes() < 3 {
            return Err(PdeError::InvalidGrid("fewer than three nodes".into()));
        }
        Ok(())
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.n_steps = (t_end / self.dt).round() as usize;
        self
    }

    pub fn nodes(&self) -> usize {
        ((self.x1 - self.x0) / self.dx).round() as usize + 1
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nodes()).map(|j| self.x(j)).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// `U = 1` left of the jump, `0` right of it, `1/2` at it.
    Heaviside { x_jump: f64 },
    /// `U = 1/2 + tanh(-eta (x - x_center)) / 2`.
    TanhFront { eta: f64, x_center: f64 },
    Constant { value: f64 },
}

impl InitialCondition {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Heaviside { x_jump } => {
                if x < x_jump {
                    1.0
                } else if x > x_jump {
                    0.0
                } else {
                    0.5
                }
            }
            Self::TanhFront { eta, x_center } => 0.5 + 0.5 * (-eta * (x - x_center)).tanh(),
            Self::Constant { value } => value,
        }
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        match *self {
            Self::TanhFront { eta, .. } if !(eta > 0.0) => {
                Err(PdeError::InvalidInitialCondition(format!("eta = {eta} must be positive")))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Solution snapshots on a fixed grid. Immutable once returned.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub x: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    /// Snapshot closest in time to `t`.
    pub fn at(&self, t: f64) -> Result<&Snapshot, PdeError> {
        let first = self.snapshots.first().ok_or(PdeError::TooFewSnapshots)?;
        let last = self.snapshots.last().ok_or(PdeError::TooFewSnapshots)?;
        let slack = 0.5 * self.grid.dt;
        if t < first.t - slack || t > last.t + slack {
            return Err(PdeError::TimeOutOfRange(t));
        }
        Ok(self
            .snapshots
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("nonempty"))
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectories always hold the initial state")
    }

    /// Total mass `sum U_j dx` of a snapshot.
    pub fn mass(&self, snapshot: &Snapshot) -> f64 {
        snapshot.u.iter().sum::<f64>() * self.grid.dx
    }
}

const BLOW_UP: f64 = 1e6;

/// How the flux `D(U) U_x` is evaluated at the interface between two nodes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceFlux {
    /// `(Phi(U_j) - Phi(U_{j-1})) / dx` with `Phi' = D`, i.e. the diffusivity
    /// averaged over the interval between the two nodal values.
    #[default]
    Potential,
    /// `D((U_{j-1} + U_j) / 2) (U_j - U_{j-1}) / dx`. Grid-scale oscillations
    /// inside a negative-diffusivity band grow without bound under this form.
    Midpoint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStepper {
    ForwardEuler,
    /// Classical fourth-order Runge–Kutta.
    #[default]
    Rk4,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scheme {
    pub flux: InterfaceFlux,
    pub stepper: TimeStepper,
}

struct Workspace {
    flux: Vec<f64>,
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            flux: vec![0.0; n + 1],
            k: std::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
        }
    }
}

/// Semi-discrete right-hand side. `coef` is `1 / dx^2`; `flux[j]` sits
/// between nodes `j - 1` and `j`, and `flux[0]`, `flux[n]` stay zero.
fn rhs(model: &Model, form: InterfaceFlux, coef: f64, u: &[f64], flux: &mut [f64], out: &mut [f64]) {
    let n = u.len();
    match form {
        InterfaceFlux::Potential => {
            let [c0, c1, c2] = model.diffusivity.coefficients();
            let phi = |v: f64| v * (c0 + v * (0.5 * c1 + v * c2 / 3.0));
            let mut prev = phi(u[0]);
            for j in 1..n {
                let cur = phi(u[j]);
                flux[j] = cur - prev;
                prev = cur;
            }
        }
        InterfaceFlux::Midpoint => {
            for j in 1..n {
                flux[j] = model.d(0.5 * (u[j - 1] + u[j])) * (u[j] - u[j - 1]);
            }
        }
    }
    flux[0] = 0.0;
    flux[n] = 0.0;
    for j in 0..n {
        out[j] = coef * (flux[j + 1] - flux[j]) + model.r(u[j]);
    }
}

/// Explicit-scheme stability warning, if any.
pub fn stability_warning(model: &Model, grid: &Grid1D) -> Option<String> {
    let dmax = model.diffusivity.max_abs_on_unit();
    let limit = grid.dx * grid.dx / (2.0 * dmax);
    (dmax > 0.0 && grid.dt > limit).then(|| {
        format!(
            "dt = {} exceeds the explicit diffusion limit dx^2 / (2 max|D|) = {:.6}",
            grid.dt, limit
        )
    })
}

/// Evolves a sampled initial condition.
///
/// A snapshot is stored at `t = 0`, after every `snapshot_every` steps and at
/// the final time.
pub fn evolve(model: &Model, grid: &Grid1D, ic: &InitialCondition, snapshot_every: usize) -> Result<Trajectory, PdeError> {
    evolve_with(model, grid, Scheme::default(), ic, snapshot_every)
}

pub fn evolve_with(
    model: &Model,
    grid: &Grid1D,
    scheme: Scheme,
    ic: &InitialCondition,
    snapshot_every: usize,
) -> Result<Trajectory, PdeError> {
    ic.validate()?;
    grid.validate()?;
    let u0: Vec<f64> = grid.xs().into_iter().map(|x| ic.eval(x)).collect();
    evolve_from(model, grid, scheme, u0, snapshot_every)
}

pub fn evolve_from(
    model: &Model,
    grid: &Grid1D,
    scheme: Scheme,
    u0: Vec<f64>,
    snapshot_every: usize,
) -> Result<Trajectory, PdeError> {
    grid.validate()?;
    let n = grid.nodes();
    if u0.len() != n {
        return Err(PdeError::InvalidInitialCondition(format!(
            "expected {n} samples, got {}",
            u0.len()
        )));
    }
    let every = snapshot_every.max(1);
    let mut warnings = Vec::new();
    if let Some(w) = stability_warning(model, grid) {
        warnings.push(w);
    }

    let coef = 1.0 / (grid.dx * grid.dx);
    let dt = grid.dt;
    let mut u = u0;
    let mut work = Workspace::new(n);
    let mut snapshots = vec![Snapshot { t: 0.0, u: u.clone() }];

    for step in 1..=grid.n_steps {
        let finite = match scheme.stepper {
            TimeStepper::ForwardEuler => {
                rhs(model, scheme.flux, coef, &u, &mut work.flux, &mut work.k[0]);
                let mut ok = true;
                for (v, k) in u.iter_mut().zip(&work.k[0]) {
                    *v += dt * k;
                    ok &= v.is_finite() && v.abs() < BLOW_UP;
                }
                ok
            }
            TimeStepper::Rk4 => {
                let Workspace { flux, k, stage } = &mut work;
                rhs(model, scheme.flux, coef, &u, flux, &mut k[0]);
                for (s, (v, d)) in stage.iter_mut().zip(u.iter().zip(&k[0])) {
                    *s = v + 0.5 * dt * d;
                }
                rhs(model, scheme.flux, coef, stage, flux, &mut k[1]);
                for (s, (v, d)) in stage.iter_mut().zip(u.iter().zip(&k[1])) {
                    *s = v + 0.5 * dt * d;
                }
                rhs(model, scheme.flux, coef, stage, flux, &mut k[2]);
                for (s, (v, d)) in stage.iter_mut().zip(u.iter().zip(&k[2])) {
                    *s = v + dt * d;
                }
                rhs(model, scheme.flux, coef, stage, flux, &mut k[3]);
                let mut ok = true;
                for (j, v) in u.iter_mut().enumerate() {
                    *v += dt / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]);
                    ok &= v.is_finite() && v.abs() < BLOW_UP;
                }
                ok
            }
        };
        let t = step as f64 * dt;
        if !finite {
            return Err(PdeError::BlowUp { time: t });
        }
        if step % every == 0 || step == grid.n_steps {
            snapshots.push(Snapshot { t, u: u.clone() });
        }
    }

    Ok(Trajectory {
        grid: *grid,
        x: grid.xs(),
        snapshots,
        warnings,
    })
}

/// Smallest `x` where `u` drops below `level`, linearly interpolated between
/// grid points. `None` when `u` never drops below `level`.
pub fn front_position(x: &[f64], u: &[f64], level: f64) -> Option<f64> {
    let j = u.iter().position(|&v| v < level)?;
    if j == 0 {
        return Some(x[0]);
    }
    let (ua, ub) = (u[j - 1], u[j]);
    let s = (ua - level) / (ua - ub);
    Some(x[j - 1] + s * (x[j] - x[j - 1]))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontTrace {
    /// `(t, L(t))` pairs.
    pub samples: Vec<(f64, f64)>,
    pub level: f64,
    pub fit_window: (f64, f64),
    pub speed: f64,
    pub fit_residual: f64,
    /// False when the residual exceeds `1e-2 |speed|`.
    pub converged: bool,
}

/// Fits a speed to `(t, L)` samples using the trailing `fit_fraction` of them.
pub fn fit_speed(samples: Vec<(f64, f64)>, level: f64, fit_fraction: f64) -> Result<FrontTrace, PdeError> {
    let n = samples.len();
    let keep = ((n as f64 * fit_fraction).ceil() as usize).clamp(2, n.max(2));
    if n < 2 {
        return Err(PdeError::TooFewSnapshots);
    }
    let window = &samples[n - keep..];
    let ts: Vec<f64> = window.iter().map(|s| s.0).collect();
    let ls: Vec<f64> = window.iter().map(|s| s.1).collect();
    let fit = fit_line(&ts, &ls).ok_or(PdeError::TooFewSnapshots)?;
    Ok(FrontTrace {
        fit_window: (ts[0], ts[ts.len() - 1]),
        speed: fit.slope,
        fit_residual: fit.rms_residual,
        converged: fit.rms_residual <= 1e-2 * fit.slope.abs(),
        samples,
        level,
    })
}

/// Locates the leading edge in every snapshot and fits its speed over the
/// last half of the series.
pub fn track_front(trajectory: &Trajectory, threshold: f64) -> Result<FrontTrace, PdeError> {
    track_front_window(trajectory, threshold, 0.5)
}

pub fn track_front_window(trajectory: &Trajectory, threshold: f64, fit_fraction: f64) -> Result<FrontTrace, PdeError> {
    if trajectory.snapshots.len() < 2 {
        return Err(PdeError::TooFewSnapshots);
    }
    let samples = trajectory
        .snapshots
        .iter()
        .map(|s| {
            front_position(&trajectory.x, &s.u, threshold)
                .map(|l| (s.t, l))
                .ok_or(PdeError::NoFront { threshold, time: s.t })
        })
        .collect::<Result<Vec<_>, _>>()?;
    fit_speed(samples, threshold, fit_fraction)
}

/// Central-difference `dU/dx` of the snapshot nearest `t` (one-sided at the ends).
pub fn gradient_profile(trajectory: &Trajectory, t: f64) -> Result<Vec<f64>, PdeError> {
    let snap = trajectory.at(t)?;
    Ok(gradient(&snap.u, trajectory.grid.dx))
}

pub fn gradient(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|j| match j {
            0 => (u[1] - u[0]) / dx,
            j if j == n - 1 => (u[n - 1] - u[n - 2]) / dx,
            j => (u[j + 1] - u[j - 1]) / (2.0 * dx),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub eta: f64,
    pub outcome: Result<FrontTrace, PdeError>,
}

impl ScanRow {
    pub fn speed(&self) -> Option<f64> {
        self.outcome.as_ref().ok().map(|t| t.speed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedScan {
    pub rows: Vec<ScanRow>,
    /// Speed at the largest successful eta.
    pub limit_speed: Option<f64>,
    /// Successful speeds are non-increasing in eta, up to `tail_tolerance`.
    pub monotone: bool,
}

/// Tolerance for the non-increasing check of [`SpeedScan::monotone`].
pub const SCAN_MONOTONE_TOLERANCE: f64 = 2e-3;

/// Runs a tanh-front simulation per `eta` and fits each front speed.
///
/// Runs are independent and distributed over the rayon pool; a failing run
/// is recorded in its row and does not stop the scan.
pub fn speed_vs_eta_scan(model: &Model, etas: &[f64], grid: &Grid1D, x_center: f64, snapshot_every: usize) -> SpeedScan {
    let rows: Vec<ScanRow> = etas
        .par_iter()
        .map(|&eta| {
            let ic = InitialCondition::TanhFront { eta, x_center };
            let outcome = evolve(model, grid, &ic, snapshot_every).and_then(|tr| track_front(&tr, FRONT_THRESHOLD));
            ScanRow { eta, outcome }
        })
        .collect();
    summarise_scan(rows)
}

pub fn summarise_scan(mut rows: Vec<ScanRow>) -> SpeedScan {
    rows.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    let ok: Vec<f64> = rows.iter().filter_map(ScanRow::speed).collect();
    let monotone = ok.windows(2).all(|w| w[1] <= w[0] + SCAN_MONOTONE_TOLERANCE);
    SpeedScan {
        limit_speed: ok.last().copied(),
        monotone,
        rows,
    }
}

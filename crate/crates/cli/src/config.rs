//! Experiment configuration: a JSON document whose every field has a default,
//! overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use wavekit::lattice::LatticeParams;
use wavekit::pde::{Grid1D, InitialCondition};
use wavekit::{DiffusivityProfile, KineticProfile, Model, ModelParams};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DiffusivityChoice {
    #[default]
    IsolatedGrouped,
    /// `leading (u - r1)(u - r2)`.
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub d_i: f64,
    pub d_g: f64,
    pub lambda: f64,
    pub d_kind: DiffusivityChoice,
    pub leading: f64,
    pub roots: [f64; 2],
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            d_i: 0.25,
            d_g: 0.05,
            lambda: 0.75,
            d_kind: DiffusivityChoice::IsolatedGrouped,
            leading: 1.0,
            roots: [0.1, 0.3],
        }
    }
}

impl ModelConfig {
    pub fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::logistic(self.d_i, self.d_g, self.lambda)?)
    }

    pub fn model(&self) -> Result<Model> {
        match self.d_kind {
            DiffusivityChoice::IsolatedGrouped => Ok(self.params()?.model()),
            DiffusivityChoice::General => {
                if !(self.lambda >= 0.0) {
                    bail!("lambda must be nonnegative, got {}", self.lambda);
                }
                let [r1, r2] = self.roots;
                Ok(Model::new(
                    DiffusivityProfile::general(self.leading, r1, r2),
                    KineticProfile::Logistic { lambda: self.lambda },
                ))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum IcKind {
    #[default]
    Heaviside,
    Tanh,
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IcConfig {
    pub kind: IcKind,
    /// Jump location or tanh centre.
    pub position: f64,
    pub eta: f64,
    pub value: f64,
}

impl Default for IcConfig {
    fn default() -> Self {
        Self {
            kind: IcKind::Heaviside,
            position: 40.0,
            eta: 1.0,
            value: 0.5,
        }
    }
}

impl IcConfig {
    pub fn initial_condition(&self) -> InitialCondition {
        match self.kind {
            IcKind::Heaviside => InitialCondition::Heaviside { x_jump: self.position },
            IcKind::Tanh => InitialCondition::TanhFront {
                eta: self.eta,
                x_center: self.position,
            },
            IcKind::Constant => InitialCondition::Constant { value: self.value },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x0: f64,
    pub x1: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Solver steps between stored snapshots.
    pub snapshot_every: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            x0: 0.0,
            x1: 100.0,
            dx: 0.1,
            dt: 0.01,
            t_end: 50.0,
            snapshot_every: 100,
        }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid1D> {
        Ok(Grid1D::new(self.x0, self.x1, self.dx, self.dt, self.t_end)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub k_max: f64,
    pub k_points: usize,
    /// Weight for the reported weighted crossings; the ideal weight if absent.
    pub nu: Option<f64>,
    /// `[start, stop, step]` for a table of weighted crossings.
    pub scan_nu: Option<[f64; 3]>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            k_max: 3.0,
            k_points: 201,
            nu: None,
            scan_nu: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub etas: Vec<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            etas: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeMode {
    MeanField,
    Stochastic,
    #[default]
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeStart {
    /// Sites left of the initial-condition position are occupied.
    #[default]
    Step,
    /// Every site starts at `ic.value`; mean field only.
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub mode: LatticeMode,
    pub start: LatticeStart,
    pub delta: f64,
    /// Defaults to `delta² / (2 max(D_i, D_g))`, the largest step keeping
    /// both motility probabilities at most one.
    pub tau: Option<f64>,
    pub runs: usize,
    /// Model time between stored snapshots.
    pub snapshot_time: f64,
    /// Occupancy level whose crossing defines the front.
    pub front_level: f64,
    /// Explicit event probabilities, bypassing the continuum mapping.
    pub probabilities: Option<LatticeParams>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            mode: LatticeMode::Both,
            start: LatticeStart::Step,
            delta: 0.05,
            tau: None,
            runs: 200,
            snapshot_time: 1.0,
            front_level: 0.5,
            probabilities: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub grid: GridConfig,
    pub ic: IcConfig,
    /// Wave speed for phase-plane and spectrum runs; `c*` if absent.
    pub speed: Option<f64>,
    pub spectrum: SpectrumConfig,
    pub scan: ScanConfig,
    pub lattice: LatticeConfig,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serialisable")
    }

    /// SHA-256 of the compact JSON form, ignoring the output directory.
    pub fn hash(&self) -> String {
        let mut bare = self.clone();
        bare.out_dir = None;
        let bytes = serde_json::to_vec(&bare).expect("config is always serialisable");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Parses `start:stop:step`.
pub fn parse_range(text: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, h] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got `{text}`"));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"));
    let range = [parse(a)?, parse(b)?, parse(h)?];
    if !(range[2] > 0.0) || range[1] < range[0] {
        return Err(format!("`{text}` is not an increasing range with a positive step"));
    }
    Ok(range)
}

/// The points `start, start + step, ...` up to `stop` inclusive.
pub fn range_points([start, stop, step]: [f64; 3]) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

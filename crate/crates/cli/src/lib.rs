//! Command-line experiment runner.
//!
//! Every run resolves an [`ExperimentConfig`] from an optional JSON file plus
//! flags, echoes it into the output directory, writes its data files and
//! finishes with a checksummed `manifest.json`.

pub mod commands;
pub mod config;
pub mod manifest;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{parse_range, DiffusivityChoice, ExperimentConfig, IcKind, LatticeMode, LatticeStart};
use manifest::{Output, RunManifest};

pub const OUT_ENV: &str = "WAVEKIT_OUT";

#[derive(Parser, Debug)]
#[command(name = "wavekit", version, about = "Travelling-wave experiments for sign-changing nonlinear diffusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Evolve the PDE from an initial front and measure its speed.
    SimulatePde(RunArgs),
    /// Classify equilibria, shoot the heteroclinic segments and assemble the wave.
    PhasePlane(RunArgs),
    /// Dispersion curves, absolute spectrum, weights and the point-spectrum certificate.
    Spectrum(RunArgs),
    /// Mean-field and stochastic lattice runs compared with the continuum.
    Lattice(RunArgs),
    /// Front speed as a function of the tanh steepness.
    SpeedScan(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SimulatePde(_) => "simulate-pde",
            Command::PhasePlane(_) => "phase-plane",
            Command::Spectrum(_) => "spectrum",
            Command::Lattice(_) => "lattice",
            Command::SpeedScan(_) => "speed-scan",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::SimulatePde(a)
            | Command::PhasePlane(a)
            | Command::Spectrum(a)
            | Command::Lattice(a)
            | Command::SpeedScan(a) => a,
        }
    }
}

/// Flags shared by all subcommands; each overrides the matching config field.
#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (beats WAVEKIT_OUT and the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans and ensembles.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,

    #[arg(long = "Di")]
    pub d_i: Option<f64>,
    #[arg(long = "Dg")]
    pub d_g: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "D-kind", value_enum)]
    pub d_kind: Option<DiffusivityChoice>,
    /// Roots of the general quadratic diffusivity.
    #[arg(long, num_args = 2, value_names = ["R1", "R2"])]
    pub roots: Option<Vec<f64>>,
    #[arg(long)]
    pub leading: Option<f64>,

    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub x1: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,

    #[arg(long, value_enum)]
    pub ic: Option<IcKind>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Jump location or tanh centre.
    #[arg(long = "x-center")]
    pub position: Option<f64>,
    /// Value for constant and uniform starts.
    #[arg(long)]
    pub value: Option<f64>,

    /// Wave speed for phase-plane and spectrum runs.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_points: Option<usize>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Weighted crossings over start:stop:step.
    #[arg(long = "scan-nu", value_parser = parse_range)]
    pub scan_nu: Option<[f64; 3]>,

    /// Comma-separated tanh steepness values.
    #[arg(long, value_delimiter = ',')]
    pub etas: Option<Vec<f64>>,

    #[arg(long, value_enum)]
    pub mode: Option<LatticeMode>,
    #[arg(long, value_enum)]
    pub start: Option<LatticeStart>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub snapshot_time: Option<f64>,
    #[arg(long)]
    pub front_level: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl RunArgs {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        let a = self.clone();
        set(&mut cfg.seed, a.seed);
        set(&mut cfg.model.d_i, a.d_i);
        set(&mut cfg.model.d_g, a.d_g);
        set(&mut cfg.model.lambda, a.lambda);
        set(&mut cfg.model.d_kind, a.d_kind);
        if let Some(r) = a.roots {
            cfg.model.roots = [r[0], r[1]];
            // Giving roots only makes sense for the general form.
            if a.d_kind.is_none() {
                cfg.model.d_kind = DiffusivityChoice::General;
            }
        }
        set(&mut cfg.model.leading, a.leading);
        set(&mut cfg.grid.x0, a.x0);
        set(&mut cfg.grid.x1, a.x1);
        set(&mut cfg.grid.dx, a.dx);
        set(&mut cfg.grid.dt, a.dt);
        set(&mut cfg.grid.t_end, a.t_end);
        set(&mut cfg.grid.snapshot_every, a.snapshot_every);
        set(&mut cfg.ic.kind, a.ic);
        set(&mut cfg.ic.eta, a.eta);
        set(&mut cfg.ic.position, a.position);
        set(&mut cfg.ic.value, a.value);
        if a.c.is_some() {
            cfg.speed = a.c;
        }
        set(&mut cfg.spectrum.k_max, a.k_max);
        set(&mut cfg.spectrum.k_points, a.k_points);
        if a.nu.is_some() {
            cfg.spectrum.nu = a.nu;
        }
        if a.scan_nu.is_some() {
            cfg.spectrum.scan_nu = a.scan_nu;
        }
        set(&mut cfg.scan.etas, a.etas);
        set(&mut cfg.lattice.mode, a.mode);
        set(&mut cfg.lattice.start, a.start);
        set(&mut cfg.lattice.delta, a.delta);
        if a.tau.is_some() {
            cfg.lattice.tau = a.tau;
        }
        set(&mut cfg.lattice.runs, a.runs);
        set(&mut cfg.lattice.snapshot_time, a.snapshot_time);
        set(&mut cfg.lattice.front_level, a.front_level);
    }
}

/// Config file, then flags; the output directory is `--out`, else
/// `env_out`, else the config's, else `wavekit-out/<command>`.
pub fn resolve_config(command: &Command, env_out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let args = command.args();
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    args.apply(&mut cfg);
    let out = args
        .out
        .clone()
        .or(env_out)
        .or(cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("wavekit-out").join(command.name()));
    cfg.out_dir = Some(out);
    Ok(cfg)
}

pub fn run(command: &Command, cfg: &ExperimentConfig) -> Result<RunManifest> {
    let dir = cfg.out_dir.clone().expect("resolved configs carry an output directory");
    let mut out = Output::create(&dir)?;
    out.write_text("config.json", &(cfg.to_json() + "\n"))?;
    let results = match command {
        Command::SimulatePde(_) => commands::simulate_pde(cfg, &mut out)?,
        Command::PhasePlane(_) => commands::phase_plane(cfg, &mut out)?,
        Command::Spectrum(_) => commands::spectrum(cfg, &mut out)?,
        Command::Lattice(_) => commands::lattice(cfg, &mut out)?,
        Command::SpeedScan(_) => commands::speed_scan(cfg, &mut out)?,
    };
    out.finish(command.name(), cfg.hash(), results)
}

/// Sizes the global rayon pool. Only the first call has an effect.
pub fn configure_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> Command {
        Cli::try_parse_from(argv).unwrap().command
    }

    #[test]
    fn flags_override_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(&path, r#"{"model": {"d_g": 0.6, "lambda": 0.5}, "seed": 3}"#).unwrap();
        let cmd = parse(&["wavekit", "simulate-pde", "--config", path.to_str().unwrap(), "--Dg", "0.2", "--out", "o"]);
        let cfg = resolve_config(&cmd, None).unwrap();
        assert_eq!(cfg.model.d_g, 0.2);
        assert_eq!(cfg.model.lambda, 0.5);
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.out_dir, Some(PathBuf::from("o")));
    }

    #[test]
    fn output_directory_precedence() {
        let cmd = parse(&["wavekit", "spectrum"]);
        assert_eq!(resolve_config(&cmd, None).unwrap().out_dir, Some(PathBuf::from("wavekit-out/spectrum")));
        assert_eq!(resolve_config(&cmd, Some("env".into())).unwrap().out_dir, Some(PathBuf::from("env")));
        let cmd = parse(&["wavekit", "spectrum", "--out", "flag"]);
        assert_eq!(resolve_config(&cmd, Some("env".into())).unwrap().out_dir, Some(PathBuf::from("flag")));
    }

    #[test]
    fn roots_switch_to_the_general_form() {
        let cmd = parse(&["wavekit", "simulate-pde", "--roots", "0.1", "0.3"]);
        let cfg = resolve_config(&cmd, None).unwrap();
        assert_eq!(cfg.model.d_kind, DiffusivityChoice::General);
        assert_eq!(cfg.model.roots, [0.1, 0.3]);
        let cmd = parse(&["wavekit", "speed-scan", "--etas", "1,2.5,4", "--scan-nu", "0:3:0.01"]);
        let cfg = resolve_config(&cmd, None).unwrap();
        assert_eq!(cfg.scan.etas, vec![1.0, 2.5, 4.0]);
        assert_eq!(cfg.spectrum.scan_nu, Some([0.0, 3.0, 0.01]));
    }
}

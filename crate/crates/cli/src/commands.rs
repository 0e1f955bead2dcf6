//! One function per subcommand. Each writes its files through an [`Output`]
//! and returns the JSON results that go into the manifest.

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use wavekit::io::{write_csv_file, write_dat_file};
use wavekit::lattice::{mean_field_step, run_ensemble, write_occupancy_csv, EnsembleConfig, LatticeParams, MeanFieldState};
use wavekit::pde::{evolve, fit_speed, front_position, speed_vs_eta_scan, track_front, Trajectory, FRONT_THRESHOLD};
use wavekit::spectral::{point_spectrum_certificate, spectrum_report, symmetric_grid, weighted_intersections};
use wavekit::wave::{
    assemble_wave, classify_equilibria, region_certificates, shoot_segment, slope_comparisons, Regime, SegmentId, WaveError,
};
use wavekit::Model;

use crate::config::{range_points, DiffusivityChoice, ExperimentConfig, LatticeMode, LatticeStart};
use crate::manifest::Output;

const SEGMENTS: [(SegmentId, &str); 3] = [
    (SegmentId::OneToBeta, "one_to_beta"),
    (SegmentId::AlphaToBeta, "alpha_to_beta"),
    (SegmentId::AlphaToZero, "alpha_to_zero"),
];

fn write_snapshots(out: &mut Output, dir: &str, tr: &Trajectory) -> Result<()> {
    let mut times = Vec::with_capacity(tr.snapshots.len());
    for (i, s) in tr.snapshots.iter().enumerate() {
        write_dat_file(&out.path(&format!("{dir}/u_{i:04}.dat"))?, &["x", "U"], &[&tr.x, &s.u])?;
        times.push(s.t);
    }
    let index: Vec<f64> = (0..times.len()).map(|i| i as f64).collect();
    write_dat_file(&out.path(&format!("{dir}/times.dat"))?, &["index", "t"], &[&index, &times])?;
    Ok(())
}

fn speed_or(model: &Model, speed: Option<f64>) -> Result<f64> {
    match speed {
        Some(c) => Ok(c),
        None => model.min_wave_speed().context("no speed given and the minimum wave speed is undefined"),
    }
}

pub fn simulate_pde(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let model = cfg.model.model()?;
    let grid = cfg.grid.grid()?;
    let tr = evolve(&model, &grid, &cfg.ic.initial_condition(), cfg.grid.snapshot_every)?;
    write_snapshots(out, "snapshots", &tr)?;
    let mut results = json!({
        "c_star": model.min_wave_speed().ok(),
        "final_mass": tr.mass(tr.last()),
        "warnings": tr.warnings,
    });
    match track_front(&tr, FRONT_THRESHOLD) {
        Ok(front) => {
            let (t, l): (Vec<f64>, Vec<f64>) = front.samples.iter().copied().unzip();
            write_csv_file(&out.path("front.csv")?, &["t", "L"], &[&t, &l])?;
            out.write_json("front.json", &json!({
                "speed": front.speed,
                "fit_residual": front.fit_residual,
                "fit_window": front.fit_window,
                "converged": front.converged,
                "level": front.level,
            }))?;
            results["speed"] = json!(front.speed);
            results["fit_residual"] = json!(front.fit_residual);
            results["converged"] = json!(front.converged);
        }
        Err(e) => {
            results["speed"] = Value::Null;
            results["front_error"] = json!(e.to_string());
        }
    }
    Ok(results)
}

pub fn phase_plane(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let model = cfg.model.model()?;
    let c = speed_or(&model, cfg.speed)?;
    let eq = classify_equilibria(&model, c)?;
    out.write_json("equilibria.json", &eq)?;
    let certs = region_certificates(&model, c)?;
    out.write_json("certificates.json", &certs)?;
    let slopes = slope_comparisons(&model, c)?;
    out.write_json("slopes.json", &slopes)?;

    let mut segments = serde_json::Map::new();
    for (id, name) in SEGMENTS {
        let entry = match shoot_segment(&model, c, id) {
            Ok(orbit) => {
                orbit.write_dat(&out.path(&format!("orbit_{name}.dat"))?)?;
                json!({
                    "monotone_u": orbit.monotone_u,
                    "u_nonnegative": orbit.u_nonnegative,
                    "entered_spiral": orbit.entered_spiral,
                    "endpoint_distance": orbit.endpoint_distance,
                    "min_u": orbit.min_u(),
                })
            }
            Err(e) => json!({ "error": e.to_string() }),
        };
        segments.insert(name.to_owned(), entry);
    }

    let (regime, diagnostic) = match assemble_wave(&model, c) {
        Ok(profile) => {
            if profile.regime != Regime::ShockRegime {
                profile.write_dat(&out.path("profile.dat")?)?;
            }
            profile.write_summary_json(&out.path("profile.json")?)?;
            (json!(profile.regime), Value::Null)
        }
        Err(e @ WaveError::NoConnection(_)) => (json!("NoConnection"), json!(e.to_string())),
        Err(e) => (Value::Null, json!(e.to_string())),
    };

    Ok(json!({
        "c": c,
        "regime": regime,
        "diagnostic": diagnostic,
        "classes": {
            "one": eq.one.class,
            "alpha": eq.alpha.class,
            "zero": eq.zero.class,
            "beta": eq.beta.class,
        },
        "certificate_margins": certs.iter().map(|r| r.margin).collect::<Vec<_>>(),
        "slopes_all_negative": slopes.all_negative(),
        "segments": segments,
    }))
}

pub fn spectrum(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let model = cfg.model.model()?;
    let c = speed_or(&model, cfg.speed)?;
    let sc = &cfg.spectrum;
    let report = spectrum_report(&model, c, &symmetric_grid(sc.k_max, sc.k_points), sc.nu)?;
    report.write_json(&out.path("spectrum.json")?)?;
    report.write_dispersion_dat(&out.path("dispersion_plus.dat")?, &out.path("dispersion_minus.dat")?)?;

    let mut results = json!({
        "c": c,
        "verdict": report.verdict,
        "k_plus": report.k_plus,
        "k_minus": report.k_minus,
        "ideal_weight": report.ideal_weight,
        "weight_range": report.weight_range,
        "nu": report.nu,
        "k_plus_nu": report.k_plus_nu,
        "k_minus_nu": report.k_minus_nu,
    });

    if let Some(range) = sc.scan_nu {
        let nus = range_points(range);
        let (plus, minus): (Vec<f64>, Vec<f64>) = nus.iter().map(|&nu| weighted_intersections(&model, c, nu)).unzip();
        write_dat_file(&out.path("nu_scan.dat")?, &["nu", "k_plus_nu", "k_minus_nu"], &[&nus, &plus, &minus])?;
        let best = (0..nus.len()).min_by(|&a, &b| plus[a].total_cmp(&plus[b])).expect("nonempty range");
        results["nu_scan_argmin"] = json!(nus[best]);
        results["nu_scan_min"] = json!(plus[best]);
    }

    // The certificate needs orbits, which only exist for sign-changing D.
    if model.diffusivity.roots().is_ok() {
        let mut certs = serde_json::Map::new();
        for (id, name) in SEGMENTS {
            let entry = match shoot_segment(&model, c, id) {
                Ok(orbit) => {
                    let cert = point_spectrum_certificate(&model, c, &orbit)?;
                    json!({
                        "certified": cert.certified,
                        "max_potential": cert.max_potential,
                        "analytic_bound": cert.analytic_bound,
                        "polynomial_bound_max": cert.polynomial_bound_max,
                        "pointwise_bound_excess": cert.pointwise_bound_excess,
                    })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
            certs.insert(name.to_owned(), entry);
        }
        out.write_json("point_spectrum.json", &certs)?;
        results["point_spectrum"] = Value::Object(certs);
    }
    Ok(results)
}

fn lattice_params(cfg: &ExperimentConfig) -> Result<(LatticeParams, Vec<String>)> {
    if let Some(p) = cfg.lattice.probabilities {
        p.validate()?;
        return Ok((p, Vec::new()));
    }
    if cfg.model.d_kind != DiffusivityChoice::IsolatedGrouped {
        bail!("the lattice model only maps onto the isolated/grouped diffusivity");
    }
    let params = cfg.model.params()?;
    let delta = cfg.lattice.delta;
    let tau = cfg.lattice.tau.unwrap_or(delta * delta / (2.0 * params.d_i.max(params.d_g)));
    let p = LatticeParams::from_continuum(&params, delta, tau)?;
    let warnings = p.continuum_limit_map()?.warnings;
    Ok((p, warnings))
}

fn front_speed(times: &[f64], x: &[f64], rows: &[Vec<f64>], level: f64) -> Value {
    let samples: Option<Vec<(f64, f64)>> = times
        .iter()
        .zip(rows)
        .map(|(&t, u)| front_position(x, u, level).map(|l| (t, l)))
        .collect();
    match samples.map(|s| fit_speed(s, level, 0.5)) {
        Some(Ok(f)) => json!({ "speed": f.speed, "fit_residual": f.fit_residual }),
        Some(Err(e)) => json!({ "error": e.to_string() }),
        None => json!({ "error": format!("occupancy never drops below {level}") }),
    }
}

pub fn lattice(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    let lc = &cfg.lattice;
    let (p, warnings) = lattice_params(cfg)?;
    let g = &cfg.grid;
    let sites = ((g.x1 - g.x0) / p.delta).round() as usize + 1;
    let filled = (((cfg.ic.position - g.x0) / p.delta).round().max(0.0) as usize).min(sites);
    let steps = (g.t_end / p.tau).round() as usize;
    let every = ((lc.snapshot_time / p.tau).round() as usize).max(1);
    let x: Vec<f64> = (0..sites).map(|k| g.x0 + k as f64 * p.delta).collect();
    out.write_json("lattice_params.json", &p)?;

    let mut results = json!({
        "params": p,
        "sites": sites,
        "steps": steps,
        "warnings": warnings,
    });

    if matches!(lc.mode, LatticeMode::MeanField | LatticeMode::Both) {
        let initial: Vec<f64> = match lc.start {
            LatticeStart::Step => (0..sites).map(|k| if k < filled { 1.0 } else { 0.0 }).collect(),
            LatticeStart::Uniform => vec![cfg.ic.value; sites],
        };
        let mut state = MeanFieldState::new(initial)?;
        let (mut times, mut rows, mut means) = (Vec::new(), Vec::new(), Vec::new());
        for step in 0..=steps {
            if step > 0 {
                state = mean_field_step(&state, &p);
            }
            if step % every == 0 || step == steps {
                let i = rows.len();
                write_occupancy_csv(&out.path(&format!("mean_field/occupancy_{i:04}.csv"))?, &state.occupancy, p.delta)?;
                times.push(step as f64 * p.tau);
                means.push(state.total() / sites as f64);
                rows.push(state.occupancy.clone());
            }
        }
        write_csv_file(&out.path("mean_field/mean_occupancy.csv")?, &["t", "mean_occupancy"], &[&times, &means])?;
        let mut mf = json!({
            "final_mean_occupancy": means.last(),
            "clamped": state.clamped,
            "invalid": state.invalid(),
        });
        if lc.start == LatticeStart::Step {
            mf["front"] = front_speed(&times, &x, &rows, lc.front_level);
        }
        results["mean_field"] = mf;
    }

    if matches!(lc.mode, LatticeMode::Stochastic | LatticeMode::Both) {
        if lc.start != LatticeStart::Step {
            bail!("stochastic runs start from a step; uniform starts are mean-field only");
        }
        let ens = run_ensemble(&p, &EnsembleConfig {
            runs: lc.runs,
            sites,
            filled,
            steps,
            snapshot_every: every,
            seed: cfg.seed,
        })?;
        for i in 0..ens.times.len() {
            ens.write_csv(&out.path(&format!("stochastic/mean_{i:04}.csv"))?, i)?;
        }
        let index: Vec<f64> = (0..ens.times.len()).map(|i| i as f64).collect();
        write_csv_file(&out.path("stochastic/times.csv")?, &["index", "t"], &[&index, &ens.times])?;
        let xs: Vec<f64> = ens.x.iter().map(|v| v + g.x0).collect();
        let stochastic = front_speed(&ens.times, &xs, &ens.mean, lc.front_level);

        // The continuum prediction from the matched PDE, measured the same way.
        let limit = p.continuum_limit_map()?.params;
        let tr = evolve(&limit.model(), &g.grid()?, &cfg.ic.initial_condition(), g.snapshot_every)?;
        let rows: Vec<Vec<f64>> = tr.snapshots.iter().map(|s| s.u.clone()).collect();
        let times: Vec<f64> = tr.snapshots.iter().map(|s| s.t).collect();
        let pde = front_speed(&times, &tr.x, &rows, lc.front_level);
        let relative = match (stochastic["speed"].as_f64(), pde["speed"].as_f64()) {
            (Some(s), Some(c)) if c != 0.0 => json!((s - c).abs() / c.abs()),
            _ => Value::Null,
        };
        results["stochastic"] = json!({
            "runs": ens.runs,
            "front": stochastic,
            "continuum_front": pde,
            "relative_difference": relative,
            "within_15_percent": relative.as_f64().map(|r| r <= 0.15),
        });
    }
    Ok(results)
}

pub fn speed_scan(cfg: &ExperimentConfig, out: &mut Output) -> Result<Value> {
    if cfg.scan.etas.is_empty() {
        bail!("the eta list is empty");
    }
    let model = cfg.model.model()?;
    let grid = cfg.grid.grid()?;
    let scan = speed_vs_eta_scan(&model, &cfg.scan.etas, &grid, cfg.ic.position, cfg.grid.snapshot_every);
    let etas: Vec<f64> = scan.rows.iter().map(|r| r.eta).collect();
    let speeds: Vec<f64> = scan.rows.iter().map(|r| r.speed().unwrap_or(f64::NAN)).collect();
    let residuals: Vec<f64> = scan
        .rows
        .iter()
        .map(|r| r.outcome.as_ref().map_or(f64::NAN, |f| f.fit_residual))
        .collect();
    write_csv_file(&out.path("scan.csv")?, &["eta", "speed", "fit_residual"], &[&etas, &speeds, &residuals])?;
    let rows: Vec<Value> = scan
        .rows
        .iter()
        .map(|r| match &r.outcome {
            Ok(f) => json!({ "eta": r.eta, "speed": f.speed, "converged": f.converged }),
            Err(e) => {
                eprintln!("eta = {}: {e}", r.eta);
                json!({ "eta": r.eta, "speed": null, "error": e.to_string() })
            }
        })
        .collect();
    let bounds = model.positive_d_bounds().ok();
    Ok(json!({
        "limit_speed": scan.limit_speed,
        "monotone": scan.monotone,
        "rows": rows,
        "c_star": model.min_wave_speed().ok(),
        "s2": bounds.map(|b| b.0),
        "s1": bounds.map(|b| b.1),
    }))
}

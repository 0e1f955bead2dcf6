//! Phase-plane construction of travelling waves.
//!
//! With `z = x - ct` and `p = D(u) du/dz`, a travelling wave solves the
//! singular system `u' = p / D(u)`, `p' = -c p / D(u) - R(u)`. Rescaling by
//! `D(u) dξ = dz` gives the polynomial field
//!
//! ```text
//! du/dξ = p,    dp/dξ = -c p - D(u) R(u)
//! ```
//!
//! whose orbits coincide with the singular ones but run backwards in `z`
//! wherever `D < 0`. The wave is assembled from three heteroclinic segments,
//! `(1,0) → (β,0)`, `(α,0) → (β,0)` and `(α,0) → (0,0)`, glued at the holes
//! `u = α` and `u = β` where the wall `D = 0` can be crossed.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::ControlFlow;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::io::write_dat_file;
use crate::model::{Model, ModelError};
use crate::ode::{DormandPrince, Termination};
use crate::poly::maximise_on_interval;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WaveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("wave speed must be positive, got {0}")]
    NonPositiveSpeed(f64),
    #[error("(1, 0) is not an equilibrium: R(1) = {0}")]
    UpperStateNotSteady(f64),
    #[error("orbit left the bounding box at xi = {xi}, (u, p) = ({u}, {p})")]
    Divergence { xi: f64, u: f64, p: f64 },
    #[error("step budget exhausted at xi = {xi}, {distance} from the target")]
    Budget { xi: f64, distance: f64 },
    #[error("integration failed ({termination:?}) at xi = {xi}")]
    Integration { termination: Termination, xi: f64 },
    #[error("(0, 0) and (beta, 0) are both spirals at c = {0}; no connection stays in [0, 1]")]
    NoConnection(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhasePoint {
    pub u: f64,
    pub p: f64,
}

/// The desingularised field `(p, -c p - D(u) R(u))`.
pub fn vector_field_desingularised(model: &Model, c: f64, point: PhasePoint) -> (f64, f64) {
    let PhasePoint { u, p } = point;
    (p, -c * p - model.d(u) * model.r(u))
}

/// The `p`-nullcline `-D(u) R(u) / c`.
pub fn nullcline_p(model: &Model, c: f64, u: f64) -> f64 {
    -model.d(u) * model.r(u) / c
}

/// Slope of the nullcline, `χ(u) = -F(u) / c`.
pub fn chi(model: &Model, c: f64, u: f64) -> f64 {
    -model.flux_derivative(u) / c
}

/// Jacobian of the desingularised field. It does not depend on `p`.
pub fn jacobian(model: &Model, c: f64, u: f64) -> [[f64; 2]; 2] {
    [[0.0, 1.0], [-model.flux_derivative(u), -c]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EquilibriumId {
    One,
    Alpha,
    Zero,
    Beta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EquilibriumClass {
    Saddle,
    StableNode,
    StableSpiral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Equilibrium {
    pub id: EquilibriumId,
    pub location: PhasePoint,
    /// `[λ+, λ-]` with `λ± = (-c ± sqrt(c² - 4F)) / 2`.
    pub eigenvalues: [Complex64; 2],
    /// `(1, λ±)`, matching `eigenvalues`.
    pub eigenvectors: [[Complex64; 2]; 2],
    pub class: EquilibriumClass,
}

impl Equilibrium {
    fn at(model: &Model, c: f64, id: EquilibriumId, u: f64) -> Self {
        let f = model.flux_derivative(u);
        let mut disc = c * c - 4.0 * f;
        // c = c* exactly should land on the node side despite rounding.
        if disc.abs() <= 1e-12 * (c * c + 4.0 * f.abs()) {
            disc = 0.0;
        }
        let root = Complex64::new(disc, 0.0).sqrt();
        let plus = (Complex64::new(-c, 0.0) + root) / 2.0;
        let minus = (Complex64::new(-c, 0.0) - root) / 2.0;
        let one = Complex64::new(1.0, 0.0);
        let class = if disc < 0.0 {
            EquilibriumClass::StableSpiral
        } else if plus.re > 0.0 {
            EquilibriumClass::Saddle
        } else {
            EquilibriumClass::StableNode
        };
        Self {
            id,
            location: PhasePoint { u, p: 0.0 },
            eigenvalues: [plus, minus],
            eigenvectors: [[one, plus], [one, minus]],
            class,
        }
    }

    pub fn lambda_plus(&self) -> Complex64 {
        self.eigenvalues[0]
    }

    pub fn is_spiral(&self) -> bool {
        self.class == EquilibriumClass::StableSpiral
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Equilibria {
    pub one: Equilibrium,
    pub alpha: Equilibrium,
    pub zero: Equilibrium,
    pub beta: Equilibrium,
}

impl Equilibria {
    pub fn get(&self, id: EquilibriumId) -> &Equilibrium {
        match id {
            EquilibriumId::One => &self.one,
            EquilibriumId::Alpha => &self.alpha,
            EquilibriumId::Zero => &self.zero,
            EquilibriumId::Beta => &self.beta,
        }
    }

    pub fn all(&self) -> [&Equilibrium; 4] {
        [&self.one, &self.alpha, &self.zero, &self.beta]
    }
}

fn check_setup(model: &Model, c: f64) -> Result<(f64, f64), WaveError> {
    if !(c > 0.0) {
        return Err(WaveError::NonPositiveSpeed(c));
    }
    model.lambda()?;
    let r1 = model.r(1.0);
    if r1.abs() > 1e-14 {
        return Err(WaveError::UpperStateNotSteady(r1));
    }
    Ok(model.diffusivity.roots()?)
}

pub fn classify_equilibria(model: &Model, c: f64) -> Result<Equilibria, WaveError> {
    let (alpha, beta) = check_setup(model, c)?;
    Ok(Equilibria {
        one: Equilibrium::at(model, c, EquilibriumId::One, 1.0),
        alpha: Equilibrium::at(model, c, EquilibriumId::Alpha, alpha),
        zero: Equilibrium::at(model, c, EquilibriumId::Zero, 0.0),
        beta: Equilibrium::at(model, c, EquilibriumId::Beta, beta),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionId {
    /// `0 < u < α`, bounded by the line through the origin.
    R1,
    /// `α < u < β`.
    R2,
    /// `β < u < 1`.
    R3,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionCertificate {
    pub region: RegionId,
    pub mu: f64,
    /// Minimum over the region of `-μ(μ + c) - g(u)`, where `g` is `D R / u`
    /// on R1 and `D R / (u - β)` on R2 and R3.
    pub margin: f64,
    pub worst_u: f64,
}

impl RegionCertificate {
    pub fn holds(&self) -> bool {
        self.margin >= 0.0
    }
}

const CERTIFICATE_GRID: usize = 10_000;

fn certify<G, DG>(region: RegionId, c: f64, a: f64, b: f64, g: G, dg: DG) -> RegionCertificate
where
    G: Fn(f64) -> f64,
    DG: Fn(f64) -> f64,
{
    let mu = -c / 2.0;
    let lhs = -mu * (mu + c);
    let (mut worst_u, mut gmax) = (a, f64::NEG_INFINITY);
    for k in 0..=CERTIFICATE_GRID {
        let u = a + (b - a) * k as f64 / CERTIFICATE_GRID as f64;
        let v = g(u);
        if v > gmax {
            gmax = v;
            worst_u = u;
        }
    }
    let (u_star, v_star) = maximise_on_interval(&g, &dg, a, b, 64, 1e-13);
    if v_star > gmax {
        gmax = v_star;
        worst_u = u_star;
    }
    RegionCertificate {
        region,
        mu,
        margin: lhs - gmax,
        worst_u,
    }
}

/// Certificates for the three trapping regions with `μ1 = μ2 = -c/2`.
pub fn region_certificates(model: &Model, c: f64) -> Result<[RegionCertificate; 3], WaveError> {
    let (alpha, beta) = check_setup(model, c)?;
    let kin = &model.kinetics;
    let d = &model.diffusivity;
    let c2 = d.coefficients()[2];
    let g1 = |u: f64| d.eval(u) * kin.per_capita(u);
    let dg1 = |u: f64| d.derivative(u) * kin.per_capita(u) + d.eval(u) * kin.per_capita_derivative(u);
    let g2 = |u: f64| d.deflate(beta, u) * kin.eval(u);
    let dg2 = |u: f64| c2 * kin.eval(u) + d.deflate(beta, u) * kin.derivative(u);
    Ok([
        certify(RegionId::R1, c, 0.0, alpha, g1, dg1),
        certify(RegionId::R2, c, alpha, beta, g2, dg2),
        certify(RegionId::R3, c, beta, 1.0, g2, dg2),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SegmentId {
    OneToBeta,
    AlphaToBeta,
    AlphaToZero,
}

impl SegmentId {
    pub fn origin(self) -> EquilibriumId {
        match self {
            SegmentId::OneToBeta => EquilibriumId::One,
            SegmentId::AlphaToBeta | SegmentId::AlphaToZero => EquilibriumId::Alpha,
        }
    }

    pub fn target(self) -> EquilibriumId {
        match self {
            SegmentId::OneToBeta | SegmentId::AlphaToBeta => EquilibriumId::Beta,
            SegmentId::AlphaToZero => EquilibriumId::Zero,
        }
    }

    /// Sign of the initial displacement in `u`.
    fn heading(self) -> f64 {
        match self {
            SegmentId::AlphaToBeta => 1.0,
            SegmentId::OneToBeta | SegmentId::AlphaToZero => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShootOptions {
    /// Offset from the origin along the unit unstable eigenvector.
    pub epsilon: f64,
    pub target_radius: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Caps the ξ step so the samples stay dense enough to interpolate.
    pub max_step: f64,
    pub max_steps: usize,
    /// Admissible `u` range; leaving it is reported as divergence.
    pub u_box: (f64, f64),
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            target_radius: 1e-6,
            rtol: 1e-10,
            atol: 1e-14,
            max_step: 0.05,
            max_steps: 1_000_000,
            u_box: (-0.5, 1.5),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitSample {
    pub xi: f64,
    pub u: f64,
    pub p: f64,
    /// `z` relative to the starting point, from `dz/dξ = D(u)`.
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseOrbit {
    pub segment: SegmentId,
    pub origin: EquilibriumId,
    pub target: EquilibriumId,
    pub c: f64,
    pub samples: Vec<OrbitSample>,
    pub monotone_u: bool,
    pub u_nonnegative: bool,
    pub entered_spiral: bool,
    /// Distance from the last sample to the target equilibrium.
    pub endpoint_distance: f64,
    pub accepted_steps: usize,
}

impl PhaseOrbit {
    fn from_samples(segment: SegmentId, c: f64, samples: Vec<OrbitSample>, target: PhasePoint, crossed: bool, accepted_steps: usize) -> Self {
        let s = segment.heading();
        let monotone_u = samples.windows(2).all(|w| (w[1].u - w[0].u) * s >= -1e-15);
        let u_nonnegative = samples.iter().all(|q| q.u >= 0.0);
        let last = samples.last().copied().unwrap_or(OrbitSample { xi: 0.0, u: f64::NAN, p: f64::NAN, z: 0.0 });
        Self {
            segment,
            origin: segment.origin(),
            target: segment.target(),
            c,
            endpoint_distance: (last.u - target.u).hypot(last.p - target.p),
            samples,
            monotone_u,
            u_nonnegative,
            entered_spiral: crossed,
            accepted_steps,
        }
    }

    pub fn min_u(&self) -> f64 {
        self.samples.iter().map(|s| s.u).fold(f64::INFINITY, f64::min)
    }

    pub fn write_dat(&self, path: &Path) -> io::Result<()> {
        let col = |f: fn(&OrbitSample) -> f64| self.samples.iter().map(f).collect::<Vec<_>>();
        let (xi, u, p, z) = (col(|s| s.xi), col(|s| s.u), col(|s| s.p), col(|s| s.z));
        write_dat_file(path, &["xi", "u", "p", "z"], &[&xi, &u, &p, &z])
    }
}

/// Largest `|p|` on the nullcline over `[0, 1]`.
fn max_nullcline(model: &Model, c: f64) -> f64 {
    (0..=1000)
        .map(|k| nullcline_p(model, c, k as f64 / 1000.0).abs())
        .fold(0.0, f64::max)
}

pub fn shoot_segment(model: &Model, c: f64, segment: SegmentId) -> Result<PhaseOrbit, WaveError> {
    shoot_segment_with(model, c, segment, &ShootOptions::default())
}

pub fn shoot_segment_with(model: &Model, c: f64, segment: SegmentId, opts: &ShootOptions) -> Result<PhaseOrbit, WaveError> {
    let eq = classify_equilibria(model, c)?;
    let origin = eq.get(segment.origin());
    let target = *eq.get(segment.target());
    let lam = origin.lambda_plus().re;
    let norm = lam.hypot(1.0);
    let s = segment.heading();
    let start = [
        origin.location.u + s * opts.epsilon / norm,
        s * opts.epsilon * lam / norm,
        0.0,
    ];

    let p_bound = 10.0 * max_nullcline(model, c);
    let tu = target.location.u;
    let half_turn = if target.is_spiral() {
        (std::f64::consts::PI / target.eigenvalues[0].im.abs()).min(1e4)
    } else {
        0.0
    };

    let mut samples = vec![OrbitSample { xi: 0.0, u: start[0], p: start[1], z: 0.0 }];
    let mut side = (start[0] - tu).signum();
    let mut crossed = false;
    let mut entered_at: Option<f64> = None;
    let mut diverged = None;

    let solver = DormandPrince {
        max_step: opts.max_step,
        max_steps: opts.max_steps,
        ..DormandPrince::with_tolerances(opts.rtol, opts.atol)
    };
    let field = |_: f64, y: &[f64; 3]| {
        let d = model.d(y[0]);
        [y[1], -c * y[1] - d * model.r(y[0]), d]
    };
    let out = solver.integrate(field, 0.0, start, f64::MAX, |xi, y| {
        let (u, p) = (y[0], y[1]);
        samples.push(OrbitSample { xi, u, p, z: y[2] });
        if !(opts.u_box.0..=opts.u_box.1).contains(&u) || p.abs() > p_bound {
            diverged = Some(WaveError::Divergence { xi, u, p });
            return ControlFlow::Break(());
        }
        let now = (u - tu).signum();
        if now != 0.0 && now != side {
            crossed = true;
            side = now;
        }
        if entered_at.is_none() && (u - tu).hypot(p) <= opts.target_radius {
            entered_at = Some(xi);
        }
        match entered_at {
            Some(_) if !target.is_spiral() || crossed => ControlFlow::Break(()),
            // Undershoots below this floor are lost in the integration error.
            Some(t0) if xi - t0 > half_turn || (u - tu).hypot(p) < 1e-6 * opts.target_radius => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        }
    });
    if let Some(err) = diverged {
        return Err(err);
    }
    match out.termination {
        Termination::Stopped => {}
        Termination::BudgetExhausted => {
            return Err(WaveError::Budget {
                xi: out.t,
                distance: (out.y[0] - tu).hypot(out.y[1]),
            })
        }
        termination => return Err(WaveError::Integration { termination, xi: out.t }),
    }
    let entered_spiral = target.is_spiral() && crossed;
    Ok(PhaseOrbit::from_samples(segment, c, samples, target.location, entered_spiral, out.accepted))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    SmoothMonotone,
    OscillatoryTail,
    /// `(β,0)` is a spiral while `(0,0)` is a node; no smooth wave exists.
    ShockRegime,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileSample {
    pub z: f64,
    pub u: f64,
    pub dudz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WaveProfile {
    pub c: f64,
    pub regime: Regime,
    /// Sorted by `z`, normalised so that `u(0) = 1/2`. Empty in the shock regime.
    pub samples: Vec<ProfileSample>,
    /// `du/dz` used at the holes, `λ+ / D'` at `α` and `β`.
    pub hole_slopes: [f64; 2],
    /// Largest distance between a segment endpoint and its target.
    pub join_error: f64,
    pub flags: [SegmentFlags; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SegmentFlags {
    pub segment: SegmentId,
    pub monotone_u: bool,
    pub u_nonnegative: bool,
    pub entered_spiral: bool,
}

impl From<&PhaseOrbit> for SegmentFlags {
    fn from(o: &PhaseOrbit) -> Self {
        Self {
            segment: o.segment,
            monotone_u: o.monotone_u,
            u_nonnegative: o.u_nonnegative,
            entered_spiral: o.entered_spiral,
        }
    }
}

fn hermite(a: &ProfileSample, b: &ProfileSample, z: f64) -> f64 {
    let h = b.z - a.z;
    let t = (z - a.z) / h;
    let (t2, t3) = (t * t, t * t * t);
    (2.0 * t3 - 3.0 * t2 + 1.0) * a.u
        + (t3 - 2.0 * t2 + t) * h * a.dudz
        + (-2.0 * t3 + 3.0 * t2) * b.u
        + (t3 - t2) * h * b.dudz
}

impl WaveProfile {
    /// Cubic Hermite interpolation of `u`, clamped to the end values outside
    /// the sampled range.
    pub fn eval(&self, z: f64) -> f64 {
        let s = &self.samples;
        if s.is_empty() {
            return f64::NAN;
        }
        if z <= s[0].z {
            return s[0].u;
        }
        if z >= s[s.len() - 1].z {
            return s[s.len() - 1].u;
        }
        let k = s.partition_point(|q| q.z <= z);
        hermite(&s[k - 1], &s[k], z)
    }

    pub fn z_range(&self) -> (f64, f64) {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (a.z, b.z),
            _ => (f64::NAN, f64::NAN),
        }
    }

    pub fn min_u(&self) -> f64 {
        self.samples.iter().map(|s| s.u).fold(f64::INFINITY, f64::min)
    }

    pub fn max_u(&self) -> f64 {
        self.samples.iter().map(|s| s.u).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_dudz(&self) -> f64 {
        self.samples.iter().map(|s| s.dudz).fold(f64::NEG_INFINITY, f64::max)
    }

    fn normalise(&mut self) {
        let s = &self.samples;
        let Some(k) = (0..s.len().saturating_sub(1)).find(|&k| (s[k].u - 0.5) * (s[k + 1].u - 0.5) <= 0.0) else {
            return;
        };
        let (a, b) = (s[k], s[k + 1]);
        let (mut lo, mut hi) = (a.z, b.z);
        let sign_lo = (a.u - 0.5).signum();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (hermite(&a, &b, mid) - 0.5).signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z0 = if a.u == 0.5 { a.z } else { 0.5 * (lo + hi) };
        for q in &mut self.samples {
            q.z -= z0;
        }
    }

    pub fn write_dat(&self, path: &Path) -> io::Result<()> {
        let z: Vec<f64> = self.samples.iter().map(|s| s.z).collect();
        let u: Vec<f64> = self.samples.iter().map(|s| s.u).collect();
        let d: Vec<f64> = self.samples.iter().map(|s| s.dudz).collect();
        write_dat_file(path, &["z", "u", "dudz"], &[&z, &u, &d])
    }

    /// Writes everything except the samples as JSON.
    pub fn write_summary_json(&self, path: &Path) -> io::Result<()> {
        let (z_min, z_max) = self.z_range();
        let summary = serde_json::json!({
            "c": self.c,
            "regime": self.regime,
            "samples": self.samples.len(),
            "z_range": [z_min, z_max],
            "min_u": self.min_u(),
            "max_dudz": self.max_dudz(),
            "hole_slopes": self.hole_slopes,
            "join_error": self.join_error,
            "flags": self.flags,
        });
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, &summary)?;
        w.flush()
    }
}

/// `z` at which the linearisation through `sample` with slope `dudz` hits `hole`.
fn hole_z(sample: &OrbitSample, hole: f64, dudz: f64) -> f64 {
    sample.z - (sample.u - hole) / dudz
}

fn profile_point(model: &Model, s: &OrbitSample, shift: f64) -> ProfileSample {
    ProfileSample {
        z: s.z + shift,
        u: s.u,
        dudz: s.p / model.d(s.u),
    }
}

pub fn assemble_wave(model: &Model, c: f64) -> Result<WaveProfile, WaveError> {
    assemble_wave_with(model, c, &ShootOptions::default())
}

pub fn assemble_wave_with(model: &Model, c: f64, opts: &ShootOptions) -> Result<WaveProfile, WaveError> {
    let (alpha, beta) = check_setup(model, c)?;
    let eq = classify_equilibria(model, c)?;
    let slope_alpha = eq.alpha.lambda_plus().re / model.d_prime(alpha);
    let slope_beta = eq.beta.lambda_plus().re / model.d_prime(beta);
    let hole_slopes = [slope_alpha, slope_beta];

    let upper = shoot_segment_with(model, c, SegmentId::OneToBeta, opts)?;
    let middle = shoot_segment_with(model, c, SegmentId::AlphaToBeta, opts)?;
    let lower = shoot_segment_with(model, c, SegmentId::AlphaToZero, opts)?;
    let flags = [(&upper).into(), (&middle).into(), (&lower).into()];

    if eq.beta.is_spiral() {
        if eq.zero.is_spiral() {
            return Err(WaveError::NoConnection(c));
        }
        return Ok(WaveProfile {
            c,
            regime: Regime::ShockRegime,
            samples: Vec::new(),
            hole_slopes,
            join_error: f64::NAN,
            flags,
        });
    }

    // The middle segment runs from α to β in ξ but from β to α in z, so its
    // endpoint is glued to the end of the upper segment and its start to
    // the start of the lower one.
    let up_last = upper.samples.last().expect("orbit has samples");
    let mid_last = middle.samples.last().expect("orbit has samples");
    let z_beta = hole_z(up_last, beta, slope_beta);
    let shift_mid = z_beta - hole_z(mid_last, beta, slope_beta);
    let z_alpha = hole_z(&middle.samples[0], alpha, slope_alpha) + shift_mid;
    let shift_low = z_alpha - hole_z(&lower.samples[0], alpha, slope_alpha);

    let mut samples = Vec::with_capacity(upper.samples.len() + middle.samples.len() + lower.samples.len() + 2);
    samples.extend(upper.samples.iter().map(|s| profile_point(model, s, 0.0)));
    samples.push(ProfileSample { z: z_beta, u: beta, dudz: slope_beta });
    samples.extend(middle.samples.iter().rev().map(|s| profile_point(model, s, shift_mid)));
    samples.push(ProfileSample { z: z_alpha, u: alpha, dudz: slope_alpha });
    samples.extend(lower.samples.iter().map(|s| profile_point(model, s, shift_low)));

    let mut sorted: Vec<ProfileSample> = Vec::with_capacity(samples.len());
    for s in samples {
        if sorted.last().map_or(true, |l| s.z > l.z) {
            sorted.push(s);
        }
    }

    let smooth = [&upper, &middle, &lower].iter().all(|o| o.monotone_u) && lower.u_nonnegative;
    let mut profile = WaveProfile {
        c,
        regime: if smooth { Regime::SmoothMonotone } else { Regime::OscillatoryTail },
        samples: sorted,
        hole_slopes,
        join_error: [&upper, &middle, &lower].iter().map(|o| o.endpoint_distance).fold(0.0, f64::max),
        flags,
    };
    profile.normalise();
    Ok(profile)
}

/// Differences between each eigenvector slope and the nullcline slope at the
/// same equilibrium. All four are negative when the trapping construction
/// applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeComparisons {
    pub one: f64,
    pub alpha: f64,
    pub zero: f64,
    pub beta: f64,
}

impl SlopeComparisons {
    pub fn all_negative(&self) -> bool {
        [self.one, self.alpha, self.zero, self.beta].iter().all(|&d| d < 0.0)
    }
}

pub fn slope_comparisons(model: &Model, c: f64) -> Result<SlopeComparisons, WaveError> {
    let eq = classify_equilibria(model, c)?;
    let diff = |e: &Equilibrium| e.lambda_plus().re - chi(model, c, e.location.u);
    Ok(SlopeComparisons {
        one: diff(&eq.one),
        alpha: diff(&eq.alpha),
        zero: diff(&eq.zero),
        beta: diff(&eq.beta),
    })
}

/// Closed form of `λ1+ - χ(1)` in terms of `k = D(1) R'(1)`.
pub fn upper_slope_gap(model: &Model, c: f64) -> f64 {
    let k = model.d(1.0) * model.r_prime(1.0);
    let c2 = c * c;
    ((c2 * c2 - 4.0 * c2 * k).sqrt() - (c2 * c2 - 4.0 * c2 * k + 4.0 * k * k).sqrt()) / (2.0 * c)
}

//! Essential, absolute and weighted spectra of the linearisation about a
//! travelling wave, and a negativity certificate for the point spectrum of
//! the desingularised problem.
//!
//! Far from the front the eigenvalue problem `L q = Λ q` reduces to the
//! constant-coefficient systems `A±(Λ)`, built from `D` and `R'` at `u = 0`
//! (`z → +∞`) and `u = 1` (`z → -∞`). Their spatial eigenvalues
//! `μ = (-c ± sqrt(c² - 4 D R' + 4 D Λ)) / (2D)` determine everything here.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::io::write_dat_file;
use crate::model::{Model, ModelError};
use crate::poly::maximise_on_interval;
use crate::wave::{PhaseOrbit, WaveProfile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    /// `z → +∞`, the invaded state `u = 0`.
    PlusInfinity,
    /// `z → -∞`, the invading state `u = 1`.
    MinusInfinity,
}

impl Side {
    fn state(self) -> f64 {
        match self {
            Side::PlusInfinity => 0.0,
            Side::MinusInfinity => 1.0,
        }
    }
}

/// `A±(Λ) + ν I`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticMatrix {
    pub side: Side,
    pub d: f64,
    pub r_prime: f64,
    pub c: f64,
    pub nu: f64,
}

impl AsymptoticMatrix {
    pub fn new(model: &Model, c: f64, side: Side) -> Self {
        let u = side.state();
        Self {
            side,
            d: model.d(u),
            r_prime: model.r_prime(u),
            c,
            nu: 0.0,
        }
    }

    pub fn weighted(self, nu: f64) -> Self {
        Self { nu, ..self }
    }

    pub fn at(&self, lambda: Complex64) -> [[Complex64; 2]; 2] {
        let nu = Complex64::new(self.nu, 0.0);
        [
            [nu, Complex64::new(1.0, 0.0)],
            [(lambda - self.r_prime) / self.d, Complex64::new(-self.c / self.d, 0.0) + nu],
        ]
    }

    /// Spatial eigenvalues `[μ+, μ-]` of the matrix, shifted by `ν`.
    pub fn eigenvalues(&self, lambda: Complex64) -> [Complex64; 2] {
        let (d, c) = (self.d, self.c);
        let root = (Complex64::new(c * c - 4.0 * d * self.r_prime, 0.0) + 4.0 * d * lambda).sqrt();
        let shift = Complex64::new(self.nu, 0.0);
        [(root - c) / (2.0 * d) + shift, (-root - c) / (2.0 * d) + shift]
    }
}

pub fn spatial_eigenvalues(model: &Model, c: f64, lambda: Complex64, side: Side) -> [Complex64; 2] {
    AsymptoticMatrix::new(model, c, side).eigenvalues(lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub k: f64,
    pub re: f64,
    pub im: f64,
}

/// `Λ(k) = -D k² + i c k + R'` at both ends.
pub fn dispersion_curves(model: &Model, c: f64, k_grid: &[f64]) -> (Vec<DispersionPoint>, Vec<DispersionPoint>) {
    let curve = |u: f64| {
        let (d, rp) = (model.d(u), model.r_prime(u));
        k_grid
            .iter()
            .map(|&k| DispersionPoint { k, re: -d * k * k + rp, im: c * k })
            .collect()
    };
    (curve(0.0), curve(1.0))
}

pub fn symmetric_grid(k_max: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|i| -k_max + 2.0 * k_max * i as f64 / (n - 1) as f64).collect()
}

/// `(K+, K-)`, the right ends of the absolute spectrum at `±∞`.
///
/// `K+` is written as `(c*² - c²) / (4 D(0))` so that it vanishes exactly at
/// `c = c*`.
pub fn absolute_spectrum_endpoints(model: &Model, c: f64) -> Result<(f64, f64), ModelError> {
    let c_star = model.min_wave_speed()?;
    let d0 = model.d(0.0);
    let k_plus = (c_star * c_star - c * c) / (4.0 * d0);
    let k_minus = -c * c / (4.0 * model.d(1.0)) + model.r_prime(1.0);
    Ok((k_plus, k_minus))
}

/// Real-axis crossings of the weighted dispersion curves.
pub fn weighted_intersections(model: &Model, c: f64, nu: f64) -> (f64, f64) {
    let at = |u: f64| model.d(u) * nu * nu - c * nu + model.r_prime(u);
    (at(0.0), at(1.0))
}

pub fn ideal_weight(model: &Model, c: f64) -> f64 {
    c / (2.0 * model.d(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightRange {
    Empty,
    Singleton { nu: f64 },
    /// Open interval on which the weighted crossing at `+∞` is negative.
    Open { lo: f64, hi: f64 },
}

impl WeightRange {
    pub fn contains(&self, nu: f64) -> bool {
        match *self {
            WeightRange::Empty => false,
            WeightRange::Singleton { nu: s } => nu == s,
            WeightRange::Open { lo, hi } => lo < nu && nu < hi,
        }
    }
}

/// Weights for which `D(0) ν² - c ν + λ < 0`, with a closed singleton at
/// `c = c*`.
pub fn admissible_weight_range(model: &Model, c: f64) -> Result<WeightRange, ModelError> {
    let c_star = model.min_wave_speed()?;
    let d0 = model.d(0.0);
    let gap = c * c - c_star * c_star;
    if gap.abs() <= 1e-12 * c * c {
        return Ok(WeightRange::Singleton { nu: ideal_weight(model, c) });
    }
    if gap < 0.0 {
        return Ok(WeightRange::Empty);
    }
    let root = gap.sqrt();
    Ok(WeightRange::Open {
        lo: (c - root) / (2.0 * d0),
        hi: (c + root) / (2.0 * d0),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    AbsolutelyUnstable,
    TransientlyStableWithWeight,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub c: f64,
    pub dispersion_plus: Vec<DispersionPoint>,
    pub dispersion_minus: Vec<DispersionPoint>,
    pub k_plus: f64,
    pub k_minus: f64,
    /// Weight at which the weighted crossings are reported.
    pub nu: f64,
    pub k_plus_nu: f64,
    pub k_minus_nu: f64,
    pub weight_range: WeightRange,
    pub ideal_weight: f64,
    pub verdict: Verdict,
}

/// Full report; the weighted crossings use `nu`, or the ideal weight if `None`.
pub fn spectrum_report(model: &Model, c: f64, k_grid: &[f64], nu: Option<f64>) -> Result<SpectrumReport, ModelError> {
    let (dispersion_plus, dispersion_minus) = dispersion_curves(model, c, k_grid);
    let (k_plus, k_minus) = absolute_spectrum_endpoints(model, c)?;
    let ideal = ideal_weight(model, c);
    let nu = nu.unwrap_or(ideal);
    let (k_plus_nu, k_minus_nu) = weighted_intersections(model, c, nu);
    Ok(SpectrumReport {
        c,
        dispersion_plus,
        dispersion_minus,
        k_plus,
        k_minus,
        nu,
        k_plus_nu,
        k_minus_nu,
        weight_range: admissible_weight_range(model, c)?,
        ideal_weight: ideal,
        verdict: if k_plus > 0.0 {
            Verdict::AbsolutelyUnstable
        } else {
            Verdict::TransientlyStableWithWeight
        },
    })
}

impl SpectrumReport {
    pub fn write_json(&self, path: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        w.flush()
    }

    /// Writes `k ReΛ ImΛ` for each side.
    pub fn write_dispersion_dat(&self, plus: &Path, minus: &Path) -> io::Result<()> {
        for (path, curve) in [(plus, &self.dispersion_plus), (minus, &self.dispersion_minus)] {
            let k: Vec<f64> = curve.iter().map(|p| p.k).collect();
            let re: Vec<f64> = curve.iter().map(|p| p.re).collect();
            let im: Vec<f64> = curve.iter().map(|p| p.im).collect();
            write_dat_file(path, &["k", "re", "im"], &[&k, &re, &im])?;
        }
        Ok(())
    }
}

/// `4 - 32u + 63u² - 36u³`.
pub fn bound_polynomial(u: f64) -> f64 {
    4.0 + u * (-32.0 + u * (63.0 - 36.0 * u))
}

fn bound_polynomial_derivative(u: f64) -> f64 {
    -32.0 + u * (126.0 - 108.0 * u)
}

/// `(argmax, max)` of the bound polynomial on `[0, 1]`.
pub fn bound_polynomial_max() -> (f64, f64) {
    maximise_on_interval(bound_polynomial, bound_polynomial_derivative, 0.0, 1.0, 64, 1e-14)
}

const POTENTIAL_TOLERANCE: f64 = 1e-10;
const POTENTIAL_GRID: usize = 10_000;

/// Negativity certificate for `d²/dξ² + F(ũ) - c²/4` along one orbit of the
/// desingularised system. It says nothing about the singular operator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSpectrumCertificate {
    pub c: f64,
    pub segment: crate::wave::SegmentId,
    pub potential_samples: Vec<f64>,
    /// Largest potential along the orbit and over a uniform grid on `[0, 1]`.
    pub max_potential: f64,
    pub polynomial_bound_max: f64,
    /// `(-c² + λ D(0) · polynomial_bound_max) / 4`.
    pub analytic_bound: f64,
    /// Largest excess of the potential over `(-c² + λ D(0) poly(u)) / 4` on
    /// the grid. Positive values mean the pointwise polynomial bound fails
    /// somewhere even though the maximum may still be controlled.
    pub pointwise_bound_excess: f64,
    pub certified: bool,
}

pub fn point_spectrum_certificate(model: &Model, c: f64, orbit: &PhaseOrbit) -> Result<PointSpectrumCertificate, ModelError> {
    let lambda = model.lambda()?;
    let d0 = model.d(0.0);
    let quarter = c * c / 4.0;
    let potential = |u: f64| model.flux_derivative(u) - quarter;
    let potential_samples: Vec<f64> = orbit.samples.iter().map(|s| potential(s.u)).collect();
    let mut max_potential = potential_samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut pointwise_bound_excess = f64::NEG_INFINITY;
    for k in 0..=POTENTIAL_GRID {
        let u = k as f64 / POTENTIAL_GRID as f64;
        let v = potential(u);
        max_potential = max_potential.max(v);
        pointwise_bound_excess = pointwise_bound_excess.max(v - (-c * c + lambda * d0 * bound_polynomial(u)) / 4.0);
    }
    let (_, polynomial_bound_max) = bound_polynomial_max();
    let analytic_bound = (-c * c + lambda * d0 * polynomial_bound_max) / 4.0;
    Ok(PointSpectrumCertificate {
        c,
        segment: orbit.segment,
        potential_samples,
        max_potential,
        polynomial_bound_max,
        analytic_bound,
        pointwise_bound_excess,
        certified: max_potential <= POTENTIAL_TOLERANCE && analytic_bound <= POTENTIAL_TOLERANCE,
    })
}

/// Coefficients of the first-order form `(q, s)' = A(z; Λ) (q, s)` of the
/// linearisation, evaluated along a computed profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearisationSample {
    pub z: f64,
    pub b: Complex64,
    pub c: f64,
}

/// `A(z; Λ) = [[0, 1], [B, C]]` at one point of the profile.
pub fn linearisation_matrix(model: &Model, c: f64, u: f64, u_z: f64, lambda: Complex64) -> [[Complex64; 2]; 2] {
    let s = linearisation_coefficients(model, c, u, u_z, lambda);
    [
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        [s.0, Complex64::new(s.1, 0.0)],
    ]
}

fn linearisation_coefficients(model: &Model, c: f64, u: f64, u_z: f64, lambda: Complex64) -> (Complex64, f64) {
    let (d, dp, dpp) = (model.d(u), model.d_prime(u), model.diffusivity.second_derivative(u));
    // From (D u')' + c u' + R = 0.
    let u_zz = (-c * u_z - model.r(u) - dp * u_z * u_z) / d;
    let b = -(Complex64::new(dp * u_zz + dpp * u_z * u_z + model.r_prime(u), 0.0) - lambda) / d;
    let cc = -(2.0 * dp * u_z + c) / d;
    (b, cc)
}

/// `B(z)` and `C(z)` at every profile sample. Both blow up at the holes.
pub fn linearisation_along(model: &Model, profile: &WaveProfile, lambda: Complex64) -> Vec<LinearisationSample> {
    profile
        .samples
        .iter()
        .map(|s| {
            let (b, c) = linearisation_coefficients(model, profile.c, s.u, s.dudz, lambda);
            LinearisationSample { z: s.z, b, c }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::{shoot_segment, SegmentId};
    use proptest::prelude::*;

    const C_STAR: f64 = 0.8660254037844386;

    fn baseline() -> Model {
        Model::logistic(0.25, 0.05, 0.75)
    }

    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn det_residual(m: [[Complex64; 2]; 2], mu: Complex64) -> f64 {
        ((m[0][0] - mu) * (m[1][1] - mu) - m[0][1] * m[1][0]).norm()
    }

    #[test]
    fn double_root_at_minimum_speed() {
        let m = baseline();
        let c = m.min_wave_speed().unwrap();
        let [a, b] = spatial_eigenvalues(&m, c, zero(), Side::PlusInfinity);
        assert!((a - b).norm() < 1e-7);
        assert!((a.re + c / (2.0 * 0.25)).abs() < 1e-7);
        assert!((a.re + 1.732).abs() < 1e-3);
        let [p, q] = spatial_eigenvalues(&m, c, zero(), Side::MinusInfinity);
        assert!(p.im == 0.0 && q.im == 0.0 && p.re > 0.0 && q.re < 0.0);
    }

    #[test]
    fn eigenvalues_are_roots_of_the_characteristic_polynomial() {
        let m = baseline();
        for side in [Side::PlusInfinity, Side::MinusInfinity] {
            for nu in [0.0, 0.7] {
                let a = AsymptoticMatrix::new(&m, 0.6, side).weighted(nu);
                for lambda in [zero(), Complex64::new(-0.3, 1.1), Complex64::new(2.0, -0.5)] {
                    let mat = a.at(lambda);
                    for mu in a.eigenvalues(lambda) {
                        assert!(det_residual(mat, mu) < 1e-12, "{side:?} {nu} {lambda}");
                    }
                }
            }
        }
    }

    #[test]
    fn dispersion_curves_at_reference_values() {
        let m = baseline();
        let grid = symmetric_grid(3.0, 61);
        let (plus, minus) = dispersion_curves(&m, C_STAR, &grid);
        let mid = grid.len() / 2;
        assert_eq!(grid[mid], 0.0);
        assert_eq!(plus[mid].re, 0.75);
        assert_eq!(minus[mid].re, -0.75);
        for curve in [&plus, &minus] {
            for w in curve[mid..].windows(2) {
                assert!(w[1].re < w[0].re);
            }
        }
        let k0 = (0.75f64 / 0.25).sqrt();
        for p in &plus {
            assert_eq!(p.re > 0.0, p.k.abs() < k0, "k = {}", p.k);
        }
    }

    #[test]
    fn endpoints_and_verdicts() {
        let m = baseline();
        let (kp, km) = absolute_spectrum_endpoints(&m, C_STAR).unwrap();
        assert_eq!(kp, 0.0);
        assert!((km + 4.5).abs() < 2e-3);
        let (_, km) = absolute_spectrum_endpoints(&m, 0.866).unwrap();
        assert!((km - (-0.866 * 0.866 / 0.2 - 0.75)).abs() < 1e-14);
        let (kp, _) = absolute_spectrum_endpoints(&m, 0.4).unwrap();
        assert!((kp - 0.59).abs() < 1e-12);
        let r = spectrum_report(&m, 0.4, &[0.0], None).unwrap();
        assert_eq!(r.verdict, Verdict::AbsolutelyUnstable);
        let r = spectrum_report(&m, C_STAR, &[0.0], None).unwrap();
        assert_eq!(r.verdict, Verdict::TransientlyStableWithWeight);
    }

    #[test]
    fn weighted_crossings() {
        let m = baseline();
        assert_eq!(weighted_intersections(&m, 0.9, 0.0), (0.75, -0.75));
        let (kp, _) = weighted_intersections(&m, 1.0, 1.0);
        assert!(kp.abs() < 1e-15);
        let c = 1.3;
        let (kp_nu, _) = weighted_intersections(&m, c, ideal_weight(&m, c));
        let (kp, _) = absolute_spectrum_endpoints(&m, c).unwrap();
        assert!((kp_nu - kp).abs() < 1e-12);
    }

    #[test]
    fn weight_ranges() {
        let m = baseline();
        match admissible_weight_range(&m, C_STAR).unwrap() {
            WeightRange::Singleton { nu } => {
                assert_eq!(nu, ideal_weight(&m, C_STAR));
                assert!(weighted_intersections(&m, C_STAR, nu).0.abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(admissible_weight_range(&m, 0.4).unwrap(), WeightRange::Empty);
        let r = admissible_weight_range(&m, 1.2).unwrap();
        assert!(r.contains(2.4));
        if let WeightRange::Open { lo, hi } = r {
            for nu in [lo, hi] {
                assert!(weighted_intersections(&m, 1.2, nu).0.abs() < 1e-12);
            }
            assert!(weighted_intersections(&m, 1.2, 0.5 * (lo + hi)).0 < 0.0);
        }
    }

    #[test]
    fn bound_polynomial_peaks_at_origin() {
        let (at, max) = bound_polynomial_max();
        assert_eq!(at, 0.0);
        assert_eq!(max, 4.0);
        let grid_max = (0..=1_000_000)
            .map(|k| bound_polynomial(k as f64 / 1e6))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((grid_max - max).abs() < 1e-9);
    }

    #[test]
    fn certificate_at_and_below_minimum_speed() {
        let m = baseline();
        let orbit = shoot_segment(&m, C_STAR, SegmentId::AlphaToZero).unwrap();
        let cert = point_spectrum_certificate(&m, C_STAR, &orbit).unwrap();
        assert!(cert.certified, "{} {}", cert.max_potential, cert.analytic_bound);
        assert!(cert.analytic_bound.abs() < 1e-15);
        assert_eq!(cert.potential_samples.len(), orbit.samples.len());

        let orbit = shoot_segment(&m, 0.5, SegmentId::AlphaToZero).unwrap();
        let cert = point_spectrum_certificate(&m, 0.5, &orbit).unwrap();
        assert!(!cert.certified);
        assert!((cert.analytic_bound - 0.125).abs() < 1e-15);
    }

    #[test]
    fn pointwise_polynomial_bound_fails_near_the_upper_state() {
        // At u = 1 the potential is -λ D(1) - c²/4 while the polynomial gives
        // -λ D(0) / 4 - c²/4, which is smaller whenever D(0) > 4 D(1).
        let m = baseline();
        let orbit = shoot_segment(&m, C_STAR, SegmentId::OneToBeta).unwrap();
        let cert = point_spectrum_certificate(&m, C_STAR, &orbit).unwrap();
        assert!(cert.pointwise_bound_excess > 0.0);
        assert!(cert.certified);
    }

    #[test]
    fn linearisation_tends_to_asymptotic_matrices() {
        let m = baseline();
        let w = crate::wave::assemble_wave(&m, 1.0).unwrap();
        let lambda = Complex64::new(0.2, 0.3);
        let coefs = linearisation_along(&m, &w, lambda);
        let last = coefs.last().unwrap();
        let plus = AsymptoticMatrix::new(&m, 1.0, Side::PlusInfinity).at(lambda);
        assert!((last.b - plus[1][0]).norm() < 1e-4);
        assert!((last.c - plus[1][1].re).abs() < 1e-4);
        let first = coefs.first().unwrap();
        let minus = AsymptoticMatrix::new(&m, 1.0, Side::MinusInfinity).at(lambda);
        assert!((first.b - minus[1][0]).norm() < 1e-3);
        let mat = linearisation_matrix(&m, 1.0, w.samples[10].u, w.samples[10].dudz, lambda);
        assert_eq!(mat[1][0], coefs[10].b);
    }

    #[test]
    fn report_exports() {
        let dir = tempfile::tempdir().unwrap();
        let r = spectrum_report(&baseline(), 1.2, &symmetric_grid(2.0, 11), None).unwrap();
        r.write_json(&dir.path().join("s.json")).unwrap();
        r.write_dispersion_dat(&dir.path().join("p.dat"), &dir.path().join("m.dat")).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
        assert_eq!(v["weight_range"]["kind"], "open");
        assert_eq!(v["verdict"], "TransientlyStableWithWeight");
        let rows = crate::io::read_dat(&std::fs::read_to_string(dir.path().join("p.dat")).unwrap()).unwrap();
        assert_eq!(rows.len(), 11);
    }

    fn admissible() -> impl Strategy<Value = (f64, f64, f64)> {
        (0.05f64..1.0, 0.01f64..0.24, 0.1f64..2.0).prop_map(|(d_i, frac, lambda)| (d_i, d_i * frac, lambda))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn branch_points_give_equal_roots((d_i, d_g, lambda) in admissible(), c in 0.05f64..3.0) {
            let m = Model::logistic(d_i, d_g, lambda);
            let (kp, km) = absolute_spectrum_endpoints(&m, c).unwrap();
            for (side, k) in [(Side::PlusInfinity, kp), (Side::MinusInfinity, km)] {
                let [a, b] = spatial_eigenvalues(&m, c, Complex64::new(k, 0.0), side);
                let scale = c / m.d(side.state());
                prop_assert!((a - b).norm() < 1e-6 * scale.max(1.0), "{side:?}: {a} {b}");
            }
        }

        #[test]
        fn unweighted_limits_agree((d_i, d_g, lambda) in admissible(), c in 0.05f64..3.0) {
            let m = Model::logistic(d_i, d_g, lambda);
            let (plus, minus) = dispersion_curves(&m, c, &[0.0]);
            prop_assert_eq!(weighted_intersections(&m, c, 0.0), (plus[0].re, minus[0].re));
        }

        #[test]
        fn ideal_weight_is_the_vertex((d_i, d_g, lambda) in admissible(), c in 0.05f64..3.0, dnu in -2.0f64..2.0) {
            let m = Model::logistic(d_i, d_g, lambda);
            let star = ideal_weight(&m, c);
            let (at_star, _) = weighted_intersections(&m, c, star);
            let (kp, _) = absolute_spectrum_endpoints(&m, c).unwrap();
            prop_assert!((at_star - kp).abs() < 1e-12 * (1.0 + kp.abs() + c * star));
            prop_assert!(weighted_intersections(&m, c, star + dnu).0 >= at_star - 1e-12);
        }

        #[test]
        fn verdict_flips_at_minimum_speed((d_i, d_g, lambda) in admissible(), t in 0.01f64..3.0) {
            let m = Model::logistic(d_i, d_g, lambda);
            let c_star = m.min_wave_speed().unwrap();
            let c = c_star * t;
            let r = spectrum_report(&m, c, &[], None).unwrap();
            let expect = if c < c_star { Verdict::AbsolutelyUnstable } else { Verdict::TransientlyStableWithWeight };
            prop_assert_eq!(r.verdict, expect);
            prop_assert!(r.k_minus < r.k_plus || c >= c_star);
        }

        #[test]
        fn left_end_of_absolute_spectrum_is_ordered((d_i, d_g, lambda) in admissible(), c in 0.05f64..3.0) {
            let m = Model::logistic(d_i, d_g, lambda);
            let (kp, km) = absolute_spectrum_endpoints(&m, c).unwrap();
            prop_assert!(km < kp);
        }
    }
}

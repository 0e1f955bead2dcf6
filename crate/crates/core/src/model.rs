//! The model family: quadratic diffusivity, kinetics and the analytic
//! thresholds derived from them.
//!
//! Everything here is closed form. A [`Model`] pairs a [`DiffusivityProfile`]
//! with a [`KineticProfile`]; the phase-plane, spectral and PDE modules all
//! consume it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{maximise_on_interval, quadratic_roots};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("kinetics are not logistic (requires lambda_i = lambda_g and K_i = K_g = 0)")]
    NotLogistic,
    #[error("diffusivity at u = 0 must be positive, got {0}")]
    NonPositiveFrontDiffusivity(f64),
    #[error("diffusivity does not change sign on [0, 1]")]
    NoSignChange,
    #[error("diffusivity has a double root at u = {at}")]
    Degenerate { at: f64 },
    #[error("diffusivity crosses zero only once on [0, 1], at u = {at}")]
    SingleCrossing { at: f64 },
    #[error("diffusivity is not positive on [0, 1]")]
    NotPositiveOnUnit,
}

/// Rates of the continuum model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Diffusivity of isolated agents.
    pub d_i: f64,
    /// Diffusivity of grouped agents.
    pub d_g: f64,
    pub lambda_i: f64,
    pub lambda_g: f64,
    pub k_i: f64,
    pub k_g: f64,
}

impl ModelParams {
    pub fn new(d_i: f64, d_g: f64, lambda_i: f64, lambda_g: f64, k_i: f64, k_g: f64) -> Result<Self, ModelError> {
        if !(d_i > 0.0) || !d_i.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "d_i",
                requirement: "positive",
                value: d_i,
            });
        }
        for (name, value) in [
            ("d_g", d_g),
            ("lambda_i", lambda_i),
            ("lambda_g", lambda_g),
            ("k_i", k_i),
            ("k_g", k_g),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name,
                    requirement: "nonnegative",
                    value,
                });
            }
        }
        Ok(Self {
            d_i,
            d_g,
            lambda_i,
            lambda_g,
            k_i,
            k_g,
        })
    }

    /// Equal proliferation rates and no death.
    pub fn logistic(d_i: f64, d_g: f64, lambda: f64) -> Result<Self, ModelError> {
        Self::new(d_i, d_g, lambda, lambda, 0.0, 0.0)
    }

    pub fn logistic_reduction(&self) -> bool {
        self.lambda_i == self.lambda_g && self.k_i == 0.0 && self.k_g == 0.0
    }

    pub fn diffusivity(&self) -> DiffusivityProfile {
        DiffusivityProfile::isolated_grouped(self.d_i, self.d_g)
    }

    pub fn kinetics(&self) -> KineticProfile {
        if self.logistic_reduction() {
            KineticProfile::Logistic { lambda: self.lambda_i }
        } else {
            KineticProfile::General {
                lambda_i: self.lambda_i,
                lambda_g: self.lambda_g,
                k_i: self.k_i,
                k_g: self.k_g,
            }
        }
    }

    pub fn model(&self) -> Model {
        Model::new(self.diffusivity(), self.kinetics())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiffusivityKind {
    /// `D_i (1 - 4u + 3u^2) + D_g (4u - 3u^2)`.
    IsolatedGrouped { d_i: f64, d_g: f64 },
    /// `a (u - r1)(u - r2)`.
    GeneralQuadratic { leading: f64, r1: f64, r2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    PositiveOnUnit,
    SignChangingTwice,
    Degenerate,
    /// Crosses once, or is nonpositive somewhere on `[0, 1]` without two roots.
    Other,
}

/// A quadratic diffusivity stored by its coefficients `c0 + c1 u + c2 u^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffusivityProfile {
    pub kind: DiffusivityKind,
    coeffs: [f64; 3],
}

impl DiffusivityProfile {
    pub fn isolated_grouped(d_i: f64, d_g: f64) -> Self {
        let coeffs = [d_i, 4.0 * (d_g - d_i), 3.0 * (d_i - d_g)];
        Self {
            kind: DiffusivityKind::IsolatedGrouped { d_i, d_g },
            coeffs,
        }
    }

    pub fn general(leading: f64, r1: f64, r2: f64) -> Self {
        let coeffs = [leading * r1 * r2, -leading * (r1 + r2), leading];
        Self {
            kind: DiffusivityKind::GeneralQuadratic { leading, r1, r2 },
            coeffs,
        }
    }

    pub fn from_kind(kind: DiffusivityKind) -> Self {
        match kind {
            DiffusivityKind::IsolatedGrouped { d_i, d_g } => Self::isolated_grouped(d_i, d_g),
            DiffusivityKind::GeneralQuadratic { leading, r1, r2 } => Self::general(leading, r1, r2),
        }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.coeffs
    }

    pub fn eval(&self, u: f64) -> f64 {
        let [c0, c1, c2] = self.coeffs;
        c0 + u * (c1 + u * c2)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        let [_, c1, c2] = self.coeffs;
        c1 + 2.0 * c2 * u
    }

    pub fn second_derivative(&self, _u: f64) -> f64 {
        2.0 * self.coeffs[2]
    }

    /// `D(u) / (u - root)` for one of the roots, evaluated without division.
    pub fn deflate(&self, root: f64, u: f64) -> f64 {
        let [_, c1, c2] = self.coeffs;
        if c2 == 0.0 {
            return c1;
        }
        // D(u) = c2 (u - root)(u - other) and the roots sum to -c1 / c2.
        let other = -c1 / c2 - root;
        c2 * (u - other)
    }

    /// The two roots of `D` in increasing order when `D` changes sign on `[0, 1]`.
    pub fn roots(&self) -> Result<(f64, f64), ModelError> {
        let [c0, c1, c2] = self.coeffs;
        if c2 == 0.0 {
            if c1 == 0.0 {
                return Err(ModelError::NoSignChange);
            }
            let r = -c0 / c1;
            return if (0.0..=1.0).contains(&r) {
                Err(ModelError::SingleCrossing { at: r })
            } else {
                Err(ModelError::NoSignChange)
            };
        }
        let disc = c1 * c1 - 4.0 * c2 * c0;
        let scale = (c1 * c1).max((4.0 * c2 * c0).abs());
        if disc.abs() <= 1e-14 * scale {
            return Err(ModelError::Degenerate { at: -c1 / (2.0 * c2) });
        }
        let known = match self.kind {
            DiffusivityKind::GeneralQuadratic { r1, r2, .. } => Some((r1.min(r2), r1.max(r2))),
            DiffusivityKind::IsolatedGrouped { .. } => quadratic_roots(c2, c1, c0),
        };
        let Some((lo, hi)) = known else {
            return Err(ModelError::NoSignChange);
        };
        let inside = |r: f64| (0.0..=1.0).contains(&r);
        match (inside(lo), inside(hi)) {
            (true, true) => Ok((lo, hi)),
            (false, false) => Err(ModelError::NoSignChange),
            (true, false) => Err(ModelError::SingleCrossing { at: lo }),
            (false, true) => Err(ModelError::SingleCrossing { at: hi }),
        }
    }

    pub fn sign_class(&self) -> SignClass {
        match self.roots() {
            Ok(_) => SignClass::SignChangingTwice,
            Err(ModelError::Degenerate { .. }) => SignClass::Degenerate,
            Err(ModelError::NoSignChange) if self.eval(0.5) > 0.0 && self.eval(0.0) > 0.0 => {
                SignClass::PositiveOnUnit
            }
            Err(_) => SignClass::Other,
        }
    }

    /// Largest `|D(u)|` over `u` in `[0, 1]`.
    pub fn max_abs_on_unit(&self) -> f64 {
        let [_, c1, c2] = self.coeffs;
        let mut m = self.eval(0.0).abs().max(self.eval(1.0).abs());
        if c2 != 0.0 {
            let v = -c1 / (2.0 * c2);
            if (0.0..=1.0).contains(&v) {
                m = m.max(self.eval(v).abs());
            }
        }
        m
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KineticProfile {
    Logistic { lambda: f64 },
    General {
        lambda_i: f64,
        lambda_g: f64,
        k_i: f64,
        k_g: f64,
    },
}

impl KineticProfile {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Self::Logistic { lambda } => lambda * u * (1.0 - u),
            Self::General {
                lambda_i,
                lambda_g,
                k_i,
                k_g,
            } => {
                let m = lambda_i - lambda_g - k_i + k_g;
                lambda_g * u * (1.0 - u) + m * u * (1.0 - u) * (1.0 - u) - k_g * u
            }
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            Self::Logistic { lambda } => lambda * (1.0 - 2.0 * u),
            Self::General {
                lambda_i,
                lambda_g,
                k_i,
                k_g,
            } => {
                let m = lambda_i - lambda_g - k_i + k_g;
                lambda_g * (1.0 - 2.0 * u) + m * (1.0 - u) * (1.0 - 3.0 * u) - k_g
            }
        }
    }

    /// `R(u) / u`, continuous at `u = 0`.
    pub fn per_capita(&self, u: f64) -> f64 {
        match *self {
            Self::Logistic { lambda } => lambda * (1.0 - u),
            Self::General {
                lambda_i,
                lambda_g,
                k_i,
                k_g,
            } => {
                let m = lambda_i - lambda_g - k_i + k_g;
                lambda_g * (1.0 - u) + m * (1.0 - u) * (1.0 - u) - k_g
            }
        }
    }

    pub fn per_capita_derivative(&self, u: f64) -> f64 {
        match *self {
            Self::Logistic { lambda } => -lambda,
            Self::General {
                lambda_i,
                lambda_g,
                k_i,
                k_g,
            } => {
                let m = lambda_i - lambda_g - k_i + k_g;
                -lambda_g - 2.0 * m * (1.0 - u)
            }
        }
    }

    /// The logistic rate when the kinetics reduce to `lambda u (1 - u)`.
    pub fn logistic_rate(&self) -> Option<f64> {
        match *self {
            Self::Logistic { lambda } => Some(lambda),
            Self::General {
                lambda_i,
                lambda_g,
                k_i,
                k_g,
            } if lambda_i == lambda_g && k_i == 0.0 && k_g == 0.0 => Some(lambda_i),
            Self::General { .. } => None,
        }
    }
}

/// Analytic thresholds of one model instance. Entries are `None` where the
/// corresponding regime does not apply.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub c_star: Option<f64>,
    pub beta_threshold: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub diffusivity: DiffusivityProfile,
    pub kinetics: KineticProfile,
}

impl Model {
    pub fn new(diffusivity: DiffusivityProfile, kinetics: KineticProfile) -> Self {
        Self { diffusivity, kinetics }
    }

    /// Logistic kinetics with the isolated/grouped diffusivity.
    pub fn logistic(d_i: f64, d_g: f64, lambda: f64) -> Self {
        Self::new(DiffusivityProfile::isolated_grouped(d_i, d_g), KineticProfile::Logistic { lambda })
    }

    pub fn d(&self, u: f64) -> f64 {
        self.diffusivity.eval(u)
    }

    pub fn d_prime(&self, u: f64) -> f64 {
        self.diffusivity.derivative(u)
    }

    pub fn r(&self, u: f64) -> f64 {
        self.kinetics.eval(u)
    }

    pub fn r_prime(&self, u: f64) -> f64 {
        self.kinetics.derivative(u)
    }

    /// `F(u) = d/du [D(u) R(u)]`.
    pub fn flux_derivative(&self, u: f64) -> f64 {
        self.d_prime(u) * self.r(u) + self.d(u) * self.r_prime(u)
    }

    pub fn lambda(&self) -> Result<f64, ModelError> {
        self.kinetics.logistic_rate().ok_or(ModelError::NotLogistic)
    }

    /// `2 sqrt(lambda D(0))`, the speed below which the origin is a spiral.
    pub fn min_wave_speed(&self) -> Result<f64, ModelError> {
        let lambda = self.lambda()?;
        let d0 = self.d(0.0);
        if !(d0 > 0.0) {
            return Err(ModelError::NonPositiveFrontDiffusivity(d0));
        }
        Ok(2.0 * (lambda * d0).sqrt())
    }

    /// `2 sqrt(D'(beta) R(beta))`, the node/spiral threshold at the upper root.
    pub fn beta_node_threshold(&self) -> Result<f64, ModelError> {
        let (_, beta) = self.diffusivity.roots()?;
        let product = self.d_prime(beta) * self.r(beta);
        Ok(2.0 * product.max(0.0).sqrt())
    }

    /// `(s2, s1)` bounds on the minimum speed for a diffusivity positive on `[0, 1]`.
    pub fn positive_d_bounds(&self) -> Result<(f64, f64), ModelError> {
        if self.diffusivity.sign_class() != SignClass::PositiveOnUnit {
            return Err(ModelError::NotPositiveOnUnit);
        }
        let s2 = self.min_wave_speed()?;
        // g(u) = D(u) R(u) / u, a polynomial once R/u is used.
        let g = |u: f64| self.d(u) * self.kinetics.per_capita(u);
        let dg = |u: f64| {
            self.d_prime(u) * self.kinetics.per_capita(u) + self.d(u) * self.kinetics.per_capita_derivative(u)
        };
        let (_, gmax) = maximise_on_interval(g, dg, 0.0, 1.0, 50, 1e-10);
        let s1 = (2.0 * gmax.max(0.0).sqrt()).max(s2);
        Ok((s2, s1))
    }

    pub fn derived_constants(&self) -> DerivedConstants {
        let roots = self.diffusivity.roots().ok();
        let (s2, s1) = match self.positive_d_bounds() {
            Ok((s2, s1)) => (Some(s2), Some(s1)),
            Err(_) => (None, None),
        };
        DerivedConstants {
            alpha: roots.map(|r| r.0),
            beta: roots.map(|r| r.1),
            c_star: self.min_wave_speed().ok(),
            beta_threshold: self.beta_node_threshold().ok(),
            s1,
            s2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> Model {
        Model::logistic(0.25, 0.05, 0.75)
    }

    fn dhat() -> Model {
        Model::new(DiffusivityProfile::general(1.0, 0.1, 0.3), KineticProfile::Logistic { lambda: 0.75 })
    }

    #[test]
    fn isolated_grouped_values() {
        let d = DiffusivityProfile::isolated_grouped(0.25, 0.05);
        assert_eq!(d.eval(0.0), 0.25);
        assert!(d.eval(0.5).abs() < 1e-15);
        assert!((d.eval(2.0 / 3.0) + 0.05 / 3.0).abs() < 1e-15);
        for u in [0.0, 0.2, 0.7, 1.3] {
            let direct = 0.25 * (1.0 - 4.0 * u + 3.0 * u * u) + 0.05 * (4.0 * u - 3.0 * u * u);
            assert!((d.eval(u) - direct).abs() < 1e-15);
        }
        assert!((d.derivative(5.0 / 6.0) - 0.2).abs() < 1e-15);
        assert!((d.second_derivative(0.3) - 1.2).abs() < 1e-15);
    }

    #[test]
    fn general_quadratic_matches_shifted_roots() {
        let d = DiffusivityProfile::general(1.0, 0.1, 0.3);
        for u in [0.0, 0.1, 0.2, 0.55, 1.0] {
            assert!((d.eval(u) - (u - 0.1) * (u - 0.3)).abs() < 1e-15);
        }
        assert_eq!(d.roots().unwrap(), (0.1, 0.3));
        assert_eq!(d.sign_class(), SignClass::SignChangingTwice);
    }

    #[test]
    fn logistic_kinetics_endpoints() {
        let k = KineticProfile::Logistic { lambda: 0.75 };
        assert_eq!(k.eval(0.0), 0.0);
        assert_eq!(k.derivative(0.0), 0.75);
        assert_eq!(k.eval(1.0), 0.0);
        assert_eq!(k.derivative(1.0), -0.75);
        assert!((k.eval(0.3) - 0.1575).abs() < 1e-15);
    }

    #[test]
    fn general_kinetics_reduces_to_logistic() {
        let l = KineticProfile::Logistic { lambda: 0.6 };
        let g = KineticProfile::General {
            lambda_i: 0.6,
            lambda_g: 0.6,
            k_i: 0.0,
            k_g: 0.0,
        };
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            assert_eq!(l.eval(u), g.eval(u));
            assert!((l.derivative(u) - g.derivative(u)).abs() < 1e-15);
        }
        assert_eq!(g.logistic_rate(), Some(0.6));
    }

    #[test]
    fn roots_of_baseline_profile() {
        let (a, b) = baseline().diffusivity.roots().unwrap();
        assert!((a - 0.5).abs() < 1e-12);
        assert!((b - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn double_root_is_reported() {
        let d = DiffusivityProfile::isolated_grouped(0.2, 0.05);
        match d.roots() {
            Err(ModelError::Degenerate { at }) => assert!((at - 2.0 / 3.0).abs() < 1e-12),
            other => panic!("expected degenerate, got {other:?}"),
        }
        assert_eq!(d.sign_class(), SignClass::Degenerate);
    }

    #[test]
    fn positive_profile_has_no_sign_change() {
        let d = DiffusivityProfile::isolated_grouped(0.25, 0.6);
        assert_eq!(d.roots(), Err(ModelError::NoSignChange));
        assert_eq!(d.sign_class(), SignClass::PositiveOnUnit);
        assert_eq!(DiffusivityProfile::isolated_grouped(0.3, 0.3).roots(), Err(ModelError::NoSignChange));
    }

    #[test]
    fn speeds_and_thresholds() {
        assert!((baseline().min_wave_speed().unwrap() - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!((dhat().min_wave_speed().unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(Model::logistic(0.25, 0.05, 0.0).min_wave_speed().unwrap(), 0.0);
        assert!((baseline().beta_node_threshold().unwrap() - 0.289).abs() < 1e-3);
        assert!((dhat().beta_node_threshold().unwrap() - 0.355).abs() < 1e-3);
        assert_eq!(Model::logistic(0.25, 0.05, 0.0).beta_node_threshold().unwrap(), 0.0);
    }

    #[test]
    fn min_speed_rejects_bad_inputs() {
        let neg = Model::new(DiffusivityProfile::general(1.0, -0.1, 0.3), KineticProfile::Logistic { lambda: 1.0 });
        assert!(matches!(neg.min_wave_speed(), Err(ModelError::NonPositiveFrontDiffusivity(_))));
        let p = ModelParams::new(0.25, 0.05, 0.5, 0.7, 0.0, 0.0).unwrap();
        assert!(!p.logistic_reduction());
        assert_eq!(p.model().min_wave_speed(), Err(ModelError::NotLogistic));
    }

    #[test]
    fn positive_bounds_for_strong_grouped_motility() {
        let (s2, s1) = Model::logistic(0.25, 0.6, 0.75).positive_d_bounds().unwrap();
        assert!((s2 - 0.866).abs() < 1e-3);
        assert!((s1 - 1.1).abs() < 5e-3);
        let (s2, s1) = Model::logistic(0.25, 0.2, 0.75).positive_d_bounds().unwrap();
        assert!((s2 - 0.866).abs() < 1e-3);
        assert!(s1 >= s2);
        let (s2, s1) = Model::logistic(0.3, 0.3, 0.5).positive_d_bounds().unwrap();
        assert!((s2 - 2.0 * (0.15f64).sqrt()).abs() < 1e-12);
        assert_eq!(s1, s2);
        assert_eq!(baseline().positive_d_bounds(), Err(ModelError::NotPositiveOnUnit));
    }

    #[test]
    fn s1_against_dense_grid() {
        let m = Model::logistic(0.25, 0.6, 0.75);
        let (_, s1) = m.positive_d_bounds().unwrap();
        let brute = (0..=1_000_000)
            .map(|k| {
                let u = k as f64 / 1e6;
                2.0 * (0.75 * (1.0 - u) * m.d(u)).sqrt()
            })
            .fold(0.0, f64::max);
        assert!((s1 - brute).abs() / brute < 1e-10);
    }

    #[test]
    fn flux_derivative_special_points() {
        let m = baseline();
        assert!((m.flux_derivative(0.0) - 0.75 * 0.25).abs() < 1e-15);
        let (_, beta) = m.diffusivity.roots().unwrap();
        assert!((m.flux_derivative(beta) - m.d_prime(beta) * m.r(beta)).abs() < 1e-14);
        let h = 1e-6;
        let fd = (m.d(0.2 + h) * m.r(0.2 + h) - m.d(0.2 - h) * m.r(0.2 - h)) / (2.0 * h);
        assert!((m.flux_derivative(0.2) - fd).abs() < 1e-8);
    }

    #[test]
    fn deflation_matches_division() {
        let d = DiffusivityProfile::isolated_grouped(0.25, 0.05);
        let (a, b) = d.roots().unwrap();
        for u in [0.1, 0.6, 0.9] {
            assert!((d.deflate(b, u) - d.eval(u) / (u - b)).abs() < 1e-12);
            assert!((d.deflate(a, u) - d.eval(u) / (u - a)).abs() < 1e-12);
        }
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.1, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.1, -0.1, 1.0, 1.0, 0.0, 0.0).is_err());
        let p = ModelParams::logistic(0.25, 0.05, 0.75).unwrap();
        assert!(p.logistic_reduction());
        assert_eq!(p.kinetics(), KineticProfile::Logistic { lambda: 0.75 });
    }
}

//! Travelling waves of reaction–diffusion equations whose nonlinear
//! diffusivity changes sign.
//!
//! The crate bundles the analytic model family ([`model`]), the discrete
//! lattice model it is derived from ([`lattice`]), a finite-difference PDE
//! solver with front tracking ([`pde`]), phase-plane construction of the
//! wave profiles ([`wave`]) and the essential/absolute spectrum toolkit
//! ([`spectral`]).

pub mod io;
pub mod lattice;
pub mod model;
pub mod ode;
pub mod pde;
pub mod poly;
pub mod spectral;
pub mod wave;

pub use model::{DerivedConstants, DiffusivityKind, DiffusivityProfile, KineticProfile, Model, ModelError, ModelParams, SignClass};

//! Poisson problem `-Δu = f` on the 1-periodic infinite strip `(0,1) × ℝ`.
//!
//! The crate provides
//! - the weighted-space index calculus and polynomial classes ([`weightspaces`]),
//! - a discretized strip with quadrature and differentiation ([`stripfield`]),
//! - the horizontal Fourier transform ([`mft`]),
//! - the closed-form periodic Green function ([`green`]),
//! - two independent solvers plus the half-strip/jump-lift pipeline ([`solver`]),
//! - weighted norms, functional-inequality checkers and decay fits ([`diagnostics`]),
//! - a JSON-driven scenario runner and verification batteries ([`config`], [`run`], [`verify`]).

pub mod config;
pub mod diagnostics;
mod error;
pub mod green;
pub mod mft;
pub mod presets;
pub mod quadrature;
pub mod run;
pub mod solver;
pub mod stripfield;
pub mod verify;
pub mod weightspaces;

pub use error::{Error, Result};
pub use stripfield::{DecayClass, ModeField, StripField, StripGrid};
pub use weightspaces::{PolyElement, WeightFunction, WeightSpec};

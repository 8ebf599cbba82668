//! Numerics for slice regular functions of a quaternionic variable on balls.
//!
//! A regular function on `B(0, R)` is represented by its power series
//! `Σ qⁿ aₙ` ([`SliceSeries`]). On top of the noncommutative series algebra
//! the crate builds regular and classical Möbius maps of the unit ball, the
//! real differential and zero structure on spheres `x + y𝕊`, Landau-type
//! injectivity and covering certificates, a Bloch–Landau procedure, and a
//! harness that checks the Schwarz–Pick family of inequalities on samples.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod error;
pub mod geometry;
pub mod landau;
pub mod moebius;
pub mod newton;
pub mod quaternion;
pub mod sampling;
pub mod scan;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use quaternion::{ImaginaryUnit, Quaternion, SphereRef};
pub use series::SliceSeries;

/// Global zero-test tolerance; individual operations take overrides.
pub const DEFAULT_EPS: f64 = 1e-10;

/// Version string embedded in every emitted report.
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

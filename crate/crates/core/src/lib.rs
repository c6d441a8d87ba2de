//! Weakly compressible smoothed particle hydrodynamics for thermo-capillary
//! multiphase flow with solid-liquid phase change.
//!
//! The solver tracks solid, liquid and gas particles plus fixed wall
//! particles. Surface tension, Marangoni, wetting and evaporation recoil
//! forces are applied through continuum surface force terms built on
//! per-pairing color fields. Time integration is kick-drift-kick Verlet
//! with a transport-velocity correction.
//!
//! The per-particle loops run on rayon when the `parallel` feature is
//! enabled. [`exec::Execution`] selects the policy at runtime so both paths
//! can be compared in one build.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod exec;
pub mod fluid;
pub mod gradlab;
pub mod integrator;
pub mod interface;
pub mod io;
pub mod kernel;
pub mod neighbors;
pub mod thermal;

pub use error::{Error, Result};

/// Vector type used for positions, velocities and gradients.
///
/// Two-dimensional runs keep the third component at zero.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3x3 matrix used for gradient corrections and tensors.
pub type Mat3 = nalgebra::Matrix3<f64>;

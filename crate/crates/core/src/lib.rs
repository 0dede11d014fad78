//! Numerical laboratory for the vanishing viscosity-dispersion limits of the
//! Rosenau and KdV regularizations of the Burgers equation.
//!
//! The pieces, bottom up:
//!
//! * [`spectral`]: periodic Fourier collocation, dealiasing, quadrature norms.
//! * [`models`]: the model family as Fourier symbols plus a quadratic flux, and mollified initial data.
//! * [`integrator`]: integrating-factor RK4 time stepping with trajectory recording.
//! * [`oracle`]: exact Riemann fans and a Godunov reference for the entropy solution of Burgers.
//! * [`estimates`]: a-priori norm monitors along a trajectory.
//! * [`entropy`]: entropy pairs, the dissipation decomposition and an `H^-1` proxy.
//! * [`harness`]: `(eps, beta)` sweeps, convergence tables, configuration and persistence.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod estimates;
pub mod harness;
pub mod integrator;
pub mod models;
pub mod oracle;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use models::{FluxConvention, InitialData, ModelKind, ModelSpec, Profile};
pub use spectral::{make_grid, Field, GridSpec};

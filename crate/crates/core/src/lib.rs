//! Numerical laboratory for a deterministic four-point extended particle.
//!
//! The crate is organised bottom-up:
//!
//! * [`process`] — the four vertex processes, their mean and the classical
//!   limit trajectory.
//! * [`observables`] — per-cycle spin, uncertainty products and string geometry.
//! * [`schrodinger`] — a periodic split-step spectral solver in two dimensions
//!   together with analytic wave packets used as oracles.
//! * [`pilot`] — complex guiding velocity fields, Bohmian trajectories,
//!   field-guided processes and ensemble equivariance.
//! * [`verification`] — convergence-rate studies and residual checks for the
//!   analytic claims (mean-process expansion, complex Hamilton-Jacobi equation,
//!   saddle structure of the complex action minimisation).
//! * [`io`] — CSV, JSON and binary frame writers.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cvec;
pub mod error;
pub mod io;
pub mod observables;
pub mod pilot;
pub mod process;
pub mod schrodinger;
pub mod tolerances;
pub mod verification;

pub use cvec::{CVec2, C64};
pub use error::{Error, Result};

//! Numerical certificates for the analytic claims of the model.
//!
//! * convergence of the vertex and mean processes to the classical path,
//! * the one-step expansion of the mean of a holomorphic test function
//!   (`[Y(t) − Y(t−ε)]/ε → Df`, with `D` the complex Dynkin operator),
//! * the second-order complex Hamilton-Jacobi residual of a wave function,
//! * the saddle structure of the quadratic complex action minimisation.

mod convergence;
mod functions;
mod hj;
mod lemma;
mod rates;
mod saddle;

pub use convergence::theorem1_convergence;
pub use functions::{dynkin_apply, TestFunction};
pub use hj::{
    complex_hj_residual, free_gaussian_residual, ground_state_residual, hj_dt_study, hj_grid_study,
    HjStats, TimeStencil,
};
pub use lemma::{lemma1_check, lemma1_residual};
pub use rates::{fit_log_slope, RateReport, RateSample, RateTarget};
pub use saddle::{eq15_consistency, SaddleReport};

//! Acceptance thresholds shared by the test suite and the scenario runner.
//!
//! Every number here is a pass/fail gate; nothing is tuned at run time.

/// Identities that are exact in exact arithmetic (spin, Heisenberg product).
pub const EXACT_IDENTITY: f64 = 1e-12;

/// Offset decomposition and vertex coincidence, relative to the state scale.
pub const OFFSET_IDENTITY_REL: f64 = 1e-13;

/// Half-width of the band around 0.5 for the fitted `delta_x ∝ sqrt(eps)` slope.
pub const SCALING_SLOPE_TOL: f64 = 1e-6;

/// Vertex convergence rate band (centre 0.5).
pub const VERTEX_RATE: f64 = 0.5;
pub const VERTEX_RATE_TOL: f64 = 0.05;

/// Minimum fitted rate for the mean process.
pub const MEAN_RATE_MIN: f64 = 0.95;

/// Lemma residual rate band (centre 1.0).
pub const LEMMA_RATE: f64 = 1.0;
pub const LEMMA_RATE_TOL: f64 = 0.1;

/// Linear test functions leave only roundoff amplified by `1/eps`.
pub const LINEAR_LEMMA_ROUNDOFF: f64 = 1e-9;

/// Free Gaussian: relative L2 error against the closed form.
pub const FREE_GAUSSIAN_L2: f64 = 1e-6;

/// Norm drift allowed per thousand split steps.
pub const NORM_DRIFT_PER_1000: f64 = 1e-12;

/// Coherent state after one harmonic period.
pub const COHERENT_RETURN_L2: f64 = 1e-5;

/// Relative energy drift for time-independent potentials over `T = 1`.
pub const ENERGY_DRIFT_REL: f64 = 1e-8;

/// Complex Hamilton-Jacobi residual on analytic free-Gaussian frames.
pub const HJ_RESIDUAL_LINF: f64 = 1e-6;

/// Stationary ground-state residual after removing its spatial mean.
pub const HJ_STATIONARY_LINF: f64 = 1e-8;

/// Self-similar spreading law, relative trajectory error.
pub const BOHM_SPREADING_REL: f64 = 1e-4;

/// Stationary trajectories in a real wave function.
pub const BOHM_STATIONARY_DRIFT: f64 = 1e-8;

/// Coherent-state trajectory against the classical oscillation.
pub const BOHM_COHERENT_ABS: f64 = 1e-3;

/// Ensemble transport after `T = 1` and the `T = 0` sampling baseline.
pub const EQUIVARIANCE_TV: f64 = 0.05;
pub const EQUIVARIANCE_TV_BASELINE: f64 = 0.03;

/// Largest tolerated fraction of ensemble members stopped near nodes.
pub const ENSEMBLE_FAILURE_FRACTION: f64 = 1e-3;

/// Guided process: minimum convergence rate of the tracking gap.
pub const GUIDED_RATE_MIN: f64 = 0.8;

/// Guided process: gap to the spreading law in units of `eps`.
pub const GUIDED_GAP_PER_EPS: f64 = 10.0;

/// Saddle check: gradient of the inner objective at the minimiser.
pub const SADDLE_STATIONARITY: f64 = 1e-10;

/// Saddle check: relative match of the quadratic increment `m|dV|^2/2`.
pub const SADDLE_QUADRATIC_REL: f64 = 1e-8;

/// Default density floor for node masking, relative to the maximum density.
pub const RHO_FLOOR: f64 = 1e-12;

/// Half-width of the band around the nominal time order of the residual stencils.
pub const HJ_TIME_ORDER_TOL: f64 = 0.1;

/// Relative L² distance of an evolved stationary state from its phase-rotated
/// oracle; same budget as the coherent return.
pub const STATIONARY_STATE_L2: f64 = 1e-5;

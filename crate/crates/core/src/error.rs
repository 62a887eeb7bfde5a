use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("velocity program returned a non-finite value at t = {t}")]
    NonFiniteVelocity { t: f64 },

    #[error("velocity table does not cover t = {t} (range [{start}, {end}])")]
    VelocityOutOfRange { t: f64, start: f64, end: f64 },

    #[error("de Broglie step size {epsilon:e} fell below the floor {floor:e}")]
    EpsilonUnderflow { epsilon: f64, floor: f64 },

    #[error("de Broglie step size is undefined for a vanishing velocity at t = {t}")]
    StationaryDeBroglie { t: f64 },

    #[error("run would need {steps} steps, above the budget of {budget}")]
    StepBudgetExceeded { steps: u64, budget: u64 },

    #[error("cycle snapshot misaligned: {reason}")]
    MisalignedCycle { reason: String },

    #[error("packet width {sigma0} is below four grid spacings ({min})")]
    PacketTooNarrow { sigma0: f64, min: f64 },

    #[error("packet mass outside the box is {outside:e}, above {limit:e}")]
    PacketTouchesBoundary { outside: f64, limit: f64 },

    #[error("high-wavenumber spectral fraction {fraction:e} exceeds {limit:e}")]
    ResolutionLoss { fraction: f64, limit: f64 },

    #[error("position ({x}, {y}) at t = {t} touches a masked node region")]
    NodeRegion { t: f64, x: f64, y: f64 },

    #[error("position ({x}, {y}) at t = {t} left the domain")]
    LeftDomain { t: f64, x: f64, y: f64 },

    #[error("frame sequence: {0}")]
    Frames(String),

    #[error("{failed} of {total} ensemble trajectories terminated early")]
    EnsembleFailures { failed: usize, total: usize },

    #[error("rate fit: {0}")]
    RateFit(String),

    #[error("malformed frame file: {0}")]
    FrameFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

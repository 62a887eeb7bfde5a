//! Guidance of trajectories and of the four-point process by a wave function.
//!
//! A frame is the complex velocity `𝒱 = −i(ħ/m)∇Ψ/Ψ` of one snapshot of `Ψ`.
//! Frames are streamed in time order and only two are held at once; between
//! them the field is interpolated linearly in time and bilinearly in space.

mod ensemble;
mod field;
mod frames;
mod guided;
mod trajectory;

pub use ensemble::{
    bin_density, bin_positions, ensemble_equivariance, sample_density, tv_distance, EnsembleReport,
    BINS,
};
pub use field::{velocity_field, VelocityField};
pub use frames::{analytic_frames, uniform_times, FrameCursor, FrameWindow, SolverFrames};
pub use guided::{guide_process, GuidedRun};
pub use trajectory::{integrate_trajectories, integrate_trajectory, Trajectory};

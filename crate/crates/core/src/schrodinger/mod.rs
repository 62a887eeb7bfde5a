//! Periodic 2D time-dependent Schrödinger solver.
//!
//! `iħ ∂Ψ/∂t = −(ħ²/2m) ΔΨ + V Ψ` is advanced with a Strang split: half a
//! potential phase, an exact kinetic phase in Fourier space, half a potential
//! phase. Wave packets must stay well inside the box; the periodic domain
//! stands in for the plane.

mod analytic;
mod fft;
mod gradients;
mod grid;
mod potential;
mod solver;
mod wave;

pub use analytic::{analytic_free_gaussian, coherent_state, harmonic_ground_state, FreeGaussian};
pub use fft::{Fft2, Spectral};
pub use gradients::{density_and_phase_gradients, PhaseGradients};
pub use grid::Grid2D;
pub use potential::Potential;
pub use solver::{split_step_evolve, FrameSummary, SplitStepSolver};
pub use wave::{init_gaussian, WaveFunction};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::process::PhysParams;

/// `ħ` and `m` for the field equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for Units {
    fn default() -> Self {
        Units {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl From<&PhysParams> for Units {
    fn from(p: &PhysParams) -> Self {
        Units {
            hbar: p.hbar,
            mass: p.mass,
        }
    }
}

/// Elements per partial sum in [`par_sums`].
const SUM_CHUNK: usize = 4096;

/// `K` parallel sums of `f(0..len)` with a fixed reduction order, so results
/// are bit-identical regardless of thread count or scheduling.
pub(crate) fn par_sums<const K: usize>(
    len: usize,
    f: impl Fn(usize) -> [f64; K] + Sync,
) -> [f64; K] {
    let partials: Vec<[f64; K]> = (0..len.div_ceil(SUM_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = [0.0; K];
            for k in c * SUM_CHUNK..((c + 1) * SUM_CHUNK).min(len) {
                let v = f(k);
                for (a, b) in acc.iter_mut().zip(v) {
                    *a += b;
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0; K];
    for p in partials {
        for (a, b) in total.iter_mut().zip(p) {
            *a += b;
        }
    }
    total
}

use rayon::prelude::*;

use crate::cvec::C64;
use crate::tolerances::RHO_FLOOR;

use super::fft::Spectral;
use super::wave::WaveFunction;

/// Polar decomposition data of `Ψ = √ρ e^{iS/ħ}` on the grid.
///
/// Gradients come from `∇Ψ/Ψ`, so no phase unwrapping is needed:
/// `∇S = ħ Im(∇Ψ/Ψ)`, `∇log ρ = 2 Re(∇Ψ/Ψ)`. Masked nodes carry zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGradients {
    pub rho: Vec<f64>,
    pub grad_log_rho: [Vec<f64>; 2],
    pub grad_s: [Vec<f64>; 2],
    /// `true` where `ρ < floor · max ρ`.
    pub mask: Vec<bool>,
    /// `∇Ψ/Ψ` per axis, zero on masked nodes.
    pub log_gradient: [Vec<C64>; 2],
}

impl PhaseGradients {
    pub fn compute(psi: &WaveFunction, spectral: &Spectral, hbar: f64, rho_floor: f64) -> Self {
        let rho = psi.density();
        let max = rho.iter().copied().fold(0.0, f64::max);
        let cut = rho_floor * max;
        let mask: Vec<bool> = rho.iter().map(|&r| r < cut || r == 0.0).collect();
        let grad = spectral.gradient(&psi.values);
        let log_gradient = grad.map(|g| {
            g.par_iter()
                .zip(psi.values.par_iter())
                .zip(mask.par_iter())
                .map(|((d, v), &m)| if m { C64::default() } else { d / v })
                .collect::<Vec<_>>()
        });
        let grad_s = [0, 1].map(|a| log_gradient[a].iter().map(|z| hbar * z.im).collect());
        let grad_log_rho = [0, 1].map(|a| log_gradient[a].iter().map(|z| 2.0 * z.re).collect());
        PhaseGradients {
            rho,
            grad_log_rho,
            grad_s,
            mask,
            log_gradient,
        }
    }
}

/// [`PhaseGradients`] with the default relative density floor.
pub fn density_and_phase_gradients(psi: &WaveFunction, hbar: f64) -> PhaseGradients {
    PhaseGradients::compute(psi, &Spectral::new(psi.grid), hbar, RHO_FLOOR)
}

use rayon::prelude::*;
use serde::Serialize;

use crate::cvec::C64;
use crate::error::{invalid, Error, Result};

use super::fft::Spectral;
use super::grid::Grid2D;
use super::par_sums;
use super::potential::Potential;
use super::wave::WaveFunction;
use super::Units;

/// Largest spectral power fraction allowed beyond 2/3 of the Nyquist wavenumber.
pub const RESOLUTION_LIMIT: f64 = 1e-8;

/// One row of the frame summary table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameSummary {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    pub x_mean: f64,
    pub y_mean: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

/// Strang-split spectral propagator for a fixed grid, potential and step.
#[derive(Clone, Debug)]
pub struct SplitStepSolver {
    pub spectral: Spectral,
    pub units: Units,
    pub dt: f64,
    potential: Vec<f64>,
    half_phase: Vec<C64>,
    full_phase: Vec<C64>,
    kinetic_phase: Vec<C64>,
}

impl SplitStepSolver {
    pub fn new(grid: Grid2D, potential: &Potential, units: Units, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be finite and > 0"));
        }
        if !(units.hbar > 0.0 && units.mass > 0.0) {
            return Err(invalid("units", "hbar and mass must be > 0"));
        }
        let v = potential.sample(&grid, units)?;
        let phase = |scale: f64| -> Vec<C64> {
            v.iter()
                .map(|&vk| C64::from_polar(1.0, -vk * dt * scale / units.hbar))
                .collect()
        };
        let spectral = Spectral::new(grid);
        let kinetic_phase = (0..grid.len())
            .map(|idx| {
                let w = units.hbar * spectral.k_squared(idx) / (2.0 * units.mass);
                C64::from_polar(1.0, -w * dt)
            })
            .collect();
        Ok(SplitStepSolver {
            half_phase: phase(0.5),
            full_phase: phase(1.0),
            potential: v,
            kinetic_phase,
            spectral,
            units,
            dt,
        })
    }

    pub fn grid(&self) -> Grid2D {
        self.spectral.grid
    }

    fn check_resolution(&self, spectrum: &[C64]) -> Result<()> {
        let fraction = self.spectral.high_band_fraction(spectrum);
        if fraction > RESOLUTION_LIMIT {
            return Err(Error::ResolutionLoss {
                fraction,
                limit: RESOLUTION_LIMIT,
            });
        }
        Ok(())
    }

    /// Advance `psi` by `n_steps · dt`. Consecutive half potential phases are
    /// fused, so each step costs one forward and one inverse transform.
    pub fn evolve(&self, psi: &mut WaveFunction, n_steps: usize) -> Result<()> {
        if psi.grid != self.grid() {
            return Err(invalid("psi", "grid does not match the solver"));
        }
        if n_steps == 0 {
            return Ok(());
        }
        let fft = &self.spectral.fft;
        let mut scratch = Vec::new();
        let data = &mut psi.values;
        mul_assign(data, &self.half_phase);
        for step in 0..n_steps {
            fft.forward(data, &mut scratch);
            if step == 0 {
                self.check_resolution(data)?;
            }
            mul_assign(data, &self.kinetic_phase);
            if step + 1 == n_steps && n_steps > 1 {
                self.check_resolution(data)?;
            }
            fft.inverse(data, &mut scratch);
            let last = step + 1 == n_steps;
            mul_assign(
                data,
                if last {
                    &self.half_phase
                } else {
                    &self.full_phase
                },
            );
        }
        psi.time += n_steps as f64 * self.dt;
        Ok(())
    }

    /// `⟨Ψ|H|Ψ⟩/⟨Ψ|Ψ⟩`, kinetic part evaluated in Fourier space.
    pub fn energy(&self, psi: &WaveFunction) -> f64 {
        let spec = self.spectral.forward(&psi.values);
        let n2 = (psi.grid.len()) as f64;
        let coef = self.units.hbar * self.units.hbar / (2.0 * self.units.mass);
        let [kinetic] = par_sums(spec.len(), |idx| {
            [coef * self.spectral.k_squared(idx) * spec[idx].norm_sqr()]
        });
        let kinetic = kinetic / n2;
        let [potential, norm] = par_sums(psi.values.len(), |k| {
            let p = psi.values[k].norm_sqr();
            [self.potential[k] * p, p]
        });
        (kinetic + potential) / norm
    }

    pub fn summary(&self, psi: &WaveFunction) -> FrameSummary {
        let (x_mean, y_mean, sigma_x, sigma_y) = psi.moments();
        FrameSummary {
            t: psi.time,
            norm: psi.norm_sqr(),
            energy: self.energy(psi),
            x_mean,
            y_mean,
            sigma_x,
            sigma_y,
        }
    }
}

fn mul_assign(data: &mut [C64], phase: &[C64]) {
    data.par_iter_mut()
        .zip(phase.par_iter())
        .for_each(|(z, p)| *z *= p);
}

/// One-shot evolution of `psi` under `pot`.
pub fn split_step_evolve(
    psi: &WaveFunction,
    pot: &Potential,
    units: Units,
    dt: f64,
    n_steps: usize,
) -> Result<WaveFunction> {
    let solver = SplitStepSolver::new(psi.grid, pot, units, dt)?;
    let mut out = psi.clone();
    solver.evolve(&mut out, n_steps)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::{
        analytic_free_gaussian, coherent_state, harmonic_ground_state, init_gaussian,
    };
    use std::f64::consts::PI;

    #[test]
    fn rejects_bad_step() {
        let g = Grid2D::new(16, 5.0).unwrap();
        assert!(SplitStepSolver::new(g, &Potential::Free, Units::default(), 0.0).is_err());
    }

    #[test]
    fn free_gaussian_matches_oracle_on_small_grid() {
        let g = Grid2D::new(128, 16.0).unwrap();
        let u = Units::default();
        let psi = init_gaussian(g, [0.0, 0.5], 1.0, [0.5, 0.0]).unwrap();
        let out = split_step_evolve(&psi, &Potential::Free, u, 0.01, 50).unwrap();
        let exact = analytic_free_gaussian(g, 1.0, [0.5, 0.0], [0.0, 0.5], 0.5, u);
        assert!((out.time - 0.5).abs() < 1e-15);
        assert!(out.relative_l2(&exact) < 1e-9);
    }

    #[test]
    fn ground_state_is_stationary_in_density() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let u = Units::default();
        let psi = harmonic_ground_state(g, [1.0, 1.0], u, 0.0);
        let out = split_step_evolve(&psi, &Potential::harmonic(1.0), u, 1e-3, 500).unwrap();
        let exact = harmonic_ground_state(g, [1.0, 1.0], u, 0.5);
        assert!(out.relative_l2(&exact) < 1e-6);
    }

    #[test]
    fn ground_state_energy() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let u = Units {
            hbar: 1.0,
            mass: 2.0,
        };
        let w = [1.0, 1.5];
        let psi = harmonic_ground_state(g, w, u, 0.0);
        let s = SplitStepSolver::new(g, &Potential::Harmonic { omega: w }, u, 1e-3).unwrap();
        assert!((s.energy(&psi) - 0.5 * (w[0] + w[1])).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_short_period() {
        let g = Grid2D::new(128, 10.0).unwrap();
        let u = Units::default();
        let w = [2.0, 2.0];
        let psi = coherent_state(g, w, [1.5, 0.0], u, 0.0);
        let steps = 4000;
        let out = split_step_evolve(&psi, &Potential::harmonic(2.0), u, PI / steps as f64, steps)
            .unwrap();
        let exact = coherent_state(g, w, [1.5, 0.0], u, PI);
        let err = out.relative_l2(&exact);
        assert!(err < 1e-5, "{err:e}");
    }

    #[test]
    fn aliasing_guard_fires() {
        let g = Grid2D::new(32, 5.0).unwrap();
        // packet moving at 0.9 of the Nyquist wavenumber
        let k = 0.9 * g.nyquist();
        let psi = init_gaussian(g, [0.0, 0.0], 4.0 * g.spacing() + 0.2, [k, 0.0]);
        let psi = match psi {
            Ok(p) => p,
            Err(_) => WaveFunction::from_fn(g, 0.0, |x, y| {
                C64::from_polar((-(x * x + y * y) / 4.0).exp(), k * x)
            }),
        };
        let r = split_step_evolve(&psi, &Potential::Free, Units::default(), 1e-3, 2);
        assert!(matches!(r, Err(Error::ResolutionLoss { .. })));
    }
}

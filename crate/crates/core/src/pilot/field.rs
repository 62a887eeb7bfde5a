use rayon::prelude::*;

use crate::cvec::{CVec2, C64};
use crate::error::{Error, Result};
use crate::schrodinger::{Grid2D, PhaseGradients, Spectral, Units, WaveFunction};
use crate::tolerances::RHO_FLOOR;

/// Complex guiding velocity of one wave-function snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub grid: Grid2D,
    pub units: Units,
    pub time: f64,
    /// `𝒱_x`, `𝒱_y` per node; zero on masked nodes.
    pub velocity: [Vec<C64>; 2],
    pub mask: Vec<bool>,
}

/// Bilinear stencil: four node indices and their weights.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stencil {
    pub nodes: [usize; 4],
    pub weights: [f64; 4],
}

impl VelocityField {
    pub fn from_gradients(grid: Grid2D, units: Units, time: f64, pg: &PhaseGradients) -> Self {
        let scale = C64::new(0.0, -units.hbar / units.mass);
        let velocity = [0, 1].map(|a| pg.log_gradient[a].par_iter().map(|g| scale * g).collect());
        VelocityField {
            grid,
            units,
            time,
            velocity,
            mask: pg.mask.clone(),
        }
    }

    pub fn new(psi: &WaveFunction, spectral: &Spectral, units: Units) -> Self {
        let pg = PhaseGradients::compute(psi, spectral, units.hbar, RHO_FLOOR);
        Self::from_gradients(psi.grid, units, psi.time, &pg)
    }

    pub fn node(&self, k: usize) -> CVec2 {
        CVec2([self.velocity[0][k], self.velocity[1][k]])
    }

    /// Largest `|m𝒱 − (∇S − i(ħ/2)∇log ρ)|` over unmasked nodes, relative to
    /// the largest `|m𝒱|`.
    pub fn decomposition_defect(&self, pg: &PhaseGradients) -> f64 {
        let m = self.units.mass;
        let (mut worst, mut scale) = (0.0f64, 0.0f64);
        for k in 0..self.grid.len() {
            if self.mask[k] {
                continue;
            }
            for a in 0..2 {
                let mv = self.velocity[a][k] * m;
                let rhs = C64::new(
                    pg.grad_s[a][k],
                    -0.5 * self.units.hbar * pg.grad_log_rho[a][k],
                );
                worst = worst.max((mv - rhs).norm());
                scale = scale.max(mv.norm());
            }
        }
        if scale > 0.0 {
            worst / scale
        } else {
            worst
        }
    }

    pub(crate) fn stencil(&self, x: [f64; 2], t: f64) -> Result<Stencil> {
        let g = self.grid;
        if !g.contains(x) {
            return Err(Error::LeftDomain {
                t,
                x: x[0],
                y: x[1],
            });
        }
        let h = g.spacing();
        let ux = (x[0] + g.half_width) / h;
        let uy = (x[1] + g.half_width) / h;
        let (i0, j0) = (ux.floor() as usize % g.n, uy.floor() as usize % g.n);
        let (fx, fy) = (ux - ux.floor(), uy - uy.floor());
        let (i1, j1) = ((i0 + 1) % g.n, (j0 + 1) % g.n);
        let nodes = [
            g.index(i0, j0),
            g.index(i1, j0),
            g.index(i0, j1),
            g.index(i1, j1),
        ];
        if nodes.iter().any(|&k| self.mask[k]) {
            return Err(Error::NodeRegion {
                t,
                x: x[0],
                y: x[1],
            });
        }
        Ok(Stencil {
            nodes,
            weights: [
                (1.0 - fx) * (1.0 - fy),
                fx * (1.0 - fy),
                (1.0 - fx) * fy,
                fx * fy,
            ],
        })
    }

    pub(crate) fn apply(&self, s: &Stencil) -> CVec2 {
        let mut out = CVec2::ZERO;
        for (k, w) in s.nodes.iter().zip(s.weights) {
            out += self.node(*k) * w;
        }
        out
    }

    /// Bilinear interpolation of the full complex velocity.
    pub fn complex_velocity_at(&self, x: [f64; 2]) -> Result<CVec2> {
        let s = self.stencil(x, self.time)?;
        Ok(self.apply(&s))
    }

    /// Bilinear interpolation of `Re 𝒱 = ∇S/m`.
    pub fn bohm_velocity_at(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        Ok(self.complex_velocity_at(x)?.re())
    }
}

/// Velocity field of `psi` with the default density floor.
pub fn velocity_field(psi: &WaveFunction, units: Units) -> VelocityField {
    VelocityField::new(psi, &Spectral::new(psi.grid), units)
}

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::cvec::C64;
use crate::error::{invalid, Error, Result};

use super::grid::Grid2D;
use super::par_sums;

/// Largest probability mass a fresh packet may place outside the box.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-12;

/// Complex field on a periodic grid at a given time.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid2D,
    pub values: Vec<C64>,
    pub time: f64,
}

impl WaveFunction {
    pub fn new(grid: Grid2D, values: Vec<C64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} nodes, got {}", grid.len(), values.len()),
            ));
        }
        if values
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(invalid("values", "must be finite"));
        }
        Ok(WaveFunction { grid, values, time })
    }

    /// Build from a closure evaluated at every node.
    pub fn from_fn(grid: Grid2D, time: f64, f: impl Fn(f64, f64) -> C64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let [x, y] = grid.position(k);
                f(x, y)
            })
            .collect();
        WaveFunction { grid, values, time }
    }

    /// Discrete `Σ |Ψ|² h²`.
    pub fn norm_sqr(&self) -> f64 {
        let [s] = par_sums(self.values.len(), |k| [self.values[k].norm_sqr()]);
        s * self.grid.cell_area()
    }

    pub fn normalize(&mut self) {
        let s = self.norm_sqr().sqrt();
        if s > 0.0 {
            self.values.par_iter_mut().for_each(|z| *z /= s);
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `(⟨x⟩, ⟨y⟩, σ_x, σ_y)` of `|Ψ|²`.
    pub fn moments(&self) -> (f64, f64, f64, f64) {
        let g = self.grid;
        let [w, sx, sy, sxx, syy] = par_sums(self.values.len(), |k| {
            let p = self.values[k].norm_sqr();
            let [x, y] = g.position(k);
            [p, p * x, p * y, p * x * x, p * y * y]
        });
        let (mx, my) = (sx / w, sy / w);
        (
            mx,
            my,
            (sxx / w - mx * mx).max(0.0).sqrt(),
            (syy / w - my * my).max(0.0).sqrt(),
        )
    }

    /// Discrete L² distance `sqrt(Σ |Ψ − Φ|² h²)`.
    pub fn l2_distance(&self, other: &WaveFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "grids differ");
        let [s] = par_sums(self.values.len(), |k| {
            [(self.values[k] - other.values[k]).norm_sqr()]
        });
        (s * self.grid.cell_area()).sqrt()
    }

    /// `‖Ψ − Φ‖ / ‖Φ‖`.
    pub fn relative_l2(&self, reference: &WaveFunction) -> f64 {
        self.l2_distance(reference) / reference.norm_sqr().sqrt()
    }
}

/// Normalised Gaussian packet `√ρ₀ e^{i k₀·x}`, `ρ₀ ∝ exp(−|x − c|²/2σ₀²)`.
pub fn init_gaussian(
    grid: Grid2D,
    center: [f64; 2],
    sigma0: f64,
    k0: [f64; 2],
) -> Result<WaveFunction> {
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(invalid("sigma0", "must be finite and > 0"));
    }
    let min = 4.0 * grid.spacing();
    if sigma0 < min {
        return Err(Error::PacketTooNarrow { sigma0, min });
    }
    if !grid.contains(center) {
        return Err(Error::PacketTouchesBoundary {
            outside: 1.0,
            limit: BOUNDARY_MASS_LIMIT,
        });
    }
    let outside = mass_outside_box(grid.half_width, center, sigma0);
    if outside > BOUNDARY_MASS_LIMIT {
        return Err(Error::PacketTouchesBoundary {
            outside,
            limit: BOUNDARY_MASS_LIMIT,
        });
    }
    let mut psi = WaveFunction::from_fn(grid, 0.0, |x, y| {
        let r2 = (x - center[0]).powi(2) + (y - center[1]).powi(2);
        C64::from_polar((-r2 / (4.0 * sigma0 * sigma0)).exp(), k0[0] * x + k0[1] * y)
    });
    psi.normalize();
    Ok(psi)
}

/// Union bound on the Gaussian mass beyond the four box edges.
fn mass_outside_box(half_width: f64, center: [f64; 2], sigma0: f64) -> f64 {
    center
        .iter()
        .map(|&c| {
            let lo = (c + half_width) / (sigma0 * SQRT_2);
            let hi = (half_width - c) / (sigma0 * SQRT_2);
            0.5 * (erfc(lo) + erfc(hi))
        })
        .sum()
}

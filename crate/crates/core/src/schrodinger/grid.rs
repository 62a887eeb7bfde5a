use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Uniform periodic grid on `[−L, L)²` with `n` nodes per axis.
///
/// Node `(i, j)` sits at `(x_i, y_j) = (−L + i h, −L + j h)` and is stored at
/// index `i·n + j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub n: usize,
    pub half_width: f64,
}

impl Grid2D {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(invalid(
                "n",
                format!("must be a power of two >= 16, got {n}"),
            ));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid("half_width", "must be finite and > 0"));
        }
        Ok(Grid2D { n, half_width })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing().powi(2)
    }

    /// Position of node `k` in storage order.
    pub fn position(&self, k: usize) -> [f64; 2] {
        [self.coord(k / self.n), self.coord(k % self.n)]
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p.iter()
            .all(|&c| c >= -self.half_width && c < self.half_width)
    }

    /// Largest wavenumber represented on the grid, `π/h`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.spacing()
    }
}

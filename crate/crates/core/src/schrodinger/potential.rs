use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

use super::grid::Grid2D;
use super::Units;

/// Real, time-independent external potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Free,
    /// `V = (m/2)(ω_x² x² + ω_y² y²)`.
    Harmonic {
        omega: [f64; 2],
    },
    /// Node values in grid storage order.
    Sampled {
        values: Vec<f64>,
    },
}

impl Potential {
    pub fn harmonic(omega: f64) -> Self {
        Potential::Harmonic {
            omega: [omega, omega],
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, Potential::Free)
    }

    pub fn value(&self, x: f64, y: f64, units: Units) -> Option<f64> {
        match self {
            Potential::Free => Some(0.0),
            Potential::Harmonic { omega } => {
                Some(0.5 * units.mass * (omega[0].powi(2) * x * x + omega[1].powi(2) * y * y))
            }
            Potential::Sampled { .. } => None,
        }
    }

    /// Node values on `grid`.
    pub fn sample(&self, grid: &Grid2D, units: Units) -> Result<Vec<f64>> {
        let values = match self {
            Potential::Sampled { values } => {
                if values.len() != grid.len() {
                    return Err(invalid(
                        "potential",
                        format!("expected {} samples, got {}", grid.len(), values.len()),
                    ));
                }
                values.clone()
            }
            _ => (0..grid.len())
                .map(|k| {
                    let [x, y] = grid.position(k);
                    self.value(x, y, units).expect("analytic potential")
                })
                .collect(),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("potential", "must be finite on the grid"));
        }
        Ok(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_values() {
        let u = Units {
            hbar: 1.0,
            mass: 2.0,
        };
        let v = Potential::Harmonic { omega: [1.0, 3.0] };
        assert_eq!(v.value(1.0, 1.0, u), Some(10.0));
        let g = Grid2D::new(16, 1.0).unwrap();
        assert!(Potential::Sampled {
            values: vec![0.0; 3]
        }
        .sample(&g, u)
        .is_err());
        assert_eq!(Potential::Free.sample(&g, u).unwrap(), vec![0.0; 256]);
    }
}

use serde::{Deserialize, Serialize};

use crate::cvec::{CVec2, C64};
use crate::error::{invalid, Error, Result};

/// Anything that can supply the complex velocity driving a process.
///
/// `center` is the current gravity center; time-only programs ignore it.
pub trait VelocitySource {
    fn sample(&self, t: f64, center: &CVec2) -> Result<CVec2>;
}

impl<S: VelocitySource + ?Sized> VelocitySource for &S {
    fn sample(&self, t: f64, center: &CVec2) -> Result<CVec2> {
        (**self).sample(t, center)
    }
}

/// A complex velocity depending on time only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VelocityProgram {
    Constant {
        value: CVec2,
    },
    /// `(cos t, sin t)`.
    Circular,
    /// `Σ_k c_k t^k`.
    Polynomial {
        coefficients: Vec<CVec2>,
    },
    /// Piecewise-linear interpolation of a sampled table.
    Table {
        times: Vec<f64>,
        values: Vec<CVec2>,
    },
}

impl VelocityProgram {
    pub fn zero() -> Self {
        VelocityProgram::Constant { value: CVec2::ZERO }
    }

    pub fn constant(value: CVec2) -> Self {
        VelocityProgram::Constant { value }
    }

    pub fn table(times: Vec<f64>, values: Vec<CVec2>) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(invalid(
                "velocity table",
                "needs at least two samples and matching lengths",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("velocity table", "times must increase strictly"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("velocity table", "values must be finite"));
        }
        Ok(VelocityProgram::Table { times, values })
    }

    pub fn evaluate(&self, t: f64) -> Result<CVec2> {
        let v = match self {
            VelocityProgram::Constant { value } => *value,
            VelocityProgram::Circular => CVec2::real(t.cos(), t.sin()),
            VelocityProgram::Polynomial { coefficients } => {
                // Horner
                let mut acc = CVec2::ZERO;
                for c in coefficients.iter().rev() {
                    acc = acc * C64::new(t, 0.0) + *c;
                }
                acc
            }
            VelocityProgram::Table { times, values } => {
                let (start, end) = (times[0], times[times.len() - 1]);
                if !(t >= start && t <= end) {
                    return Err(Error::VelocityOutOfRange { t, start, end });
                }
                let k = times.partition_point(|&s| s <= t).clamp(1, times.len() - 1);
                let (t0, t1) = (times[k - 1], times[k]);
                let w = (t - t0) / (t1 - t0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteVelocity { t })
        }
    }
}

impl VelocitySource for VelocityProgram {
    fn sample(&self, t: f64, _center: &CVec2) -> Result<CVec2> {
        self.evaluate(t)
    }
}

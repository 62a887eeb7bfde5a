use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cvec::C64;
use crate::error::{invalid, Error, Result};

/// How the time step is chosen along a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    /// The configured `epsilon` is used throughout.
    #[default]
    Fixed,
    /// `4 eps = h / (m |v|²)`, refreshed at every cycle boundary.
    DeBroglie,
    /// `4 eps = h / (m c²)`, constant.
    Compton,
}

/// Physical constants of a run. `hbar`, `mass`, `epsilon` and `light_speed`
/// are strictly positive; `epsilon_floor = 0` disables the underflow guard.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub hbar: f64,
    pub mass: f64,
    pub epsilon: f64,
    pub epsilon_mode: EpsilonMode,
    pub light_speed: f64,
    pub epsilon_floor: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            hbar: 1.0,
            mass: 1.0,
            epsilon: 0.01,
            epsilon_mode: EpsilonMode::Fixed,
            light_speed: 1.0,
            epsilon_floor: 0.0,
        }
    }
}

impl PhysParams {
    pub fn new(hbar: f64, mass: f64, epsilon: f64) -> Result<Self> {
        let p = PhysParams {
            hbar,
            mass,
            epsilon,
            ..PhysParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_mode(mut self, mode: EpsilonMode) -> Self {
        self.epsilon_mode = mode;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        positive("epsilon", self.epsilon)?;
        positive("light_speed", self.light_speed)?;
        if !(self.epsilon_floor >= 0.0 && self.epsilon_floor.is_finite()) {
            return Err(invalid("epsilon_floor", "must be finite and non-negative"));
        }
        Ok(())
    }

    /// Planck's constant `h = 2π ħ`.
    pub fn planck_h(&self) -> f64 {
        2.0 * PI * self.hbar
    }

    /// Step size for the de Broglie identification at real speed `speed`.
    pub fn de_broglie_epsilon(&self, speed: f64, t: f64) -> Result<f64> {
        if speed <= 0.0 || !speed.is_finite() {
            return Err(Error::StationaryDeBroglie { t });
        }
        let eps = self.planck_h() / (4.0 * self.mass * speed * speed);
        self.check_floor(eps)
    }

    pub fn compton_epsilon(&self) -> f64 {
        self.planck_h() / (4.0 * self.mass * self.light_speed * self.light_speed)
    }

    /// Step size of the first cycle, given the real speed sampled at `t = 0`.
    pub fn initial_epsilon(&self, speed: f64) -> Result<f64> {
        match self.epsilon_mode {
            EpsilonMode::Fixed => Ok(self.epsilon),
            EpsilonMode::Compton => self.check_floor(self.compton_epsilon()),
            EpsilonMode::DeBroglie => self.de_broglie_epsilon(speed, 0.0),
        }
    }

    fn check_floor(&self, eps: f64) -> Result<f64> {
        if eps < self.epsilon_floor {
            return Err(Error::EpsilonUnderflow {
                epsilon: eps,
                floor: self.epsilon_floor,
            });
        }
        Ok(eps)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

/// Vertex fluctuation amplitude `γ = (1+i) sqrt(ħ ε / 4m)`.
pub fn gamma(params: &PhysParams) -> C64 {
    gamma_at(params.hbar, params.mass, params.epsilon)
}

pub fn gamma_at(hbar: f64, mass: f64, epsilon: f64) -> C64 {
    C64::new(1.0, 1.0) * (hbar * epsilon / (4.0 * mass)).sqrt()
}

/// Real-space fluctuation amplitude `a = sqrt(ħ ε / 4m)`.
pub fn real_amplitude(hbar: f64, mass: f64, epsilon: f64) -> f64 {
    (hbar * epsilon / (4.0 * mass)).sqrt()
}

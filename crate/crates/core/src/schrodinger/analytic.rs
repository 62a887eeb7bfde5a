//! Closed-form solutions used as oracles.

use std::f64::consts::PI;

use crate::cvec::{CVec2, C64};

use super::grid::Grid2D;
use super::wave::WaveFunction;
use super::Units;

/// Free Gaussian packet with density width `sigma0`, wavevector `k0` and
/// initial center `center`. All formulas below are exact solutions of the
/// free equation on the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeGaussian {
    pub sigma0: f64,
    pub k0: [f64; 2],
    pub center: [f64; 2],
    pub units: Units,
}

impl FreeGaussian {
    fn spread(&self, t: f64) -> C64 {
        C64::new(
            1.0,
            self.units.hbar * t / (2.0 * self.units.mass * self.sigma0.powi(2)),
        )
    }

    /// `log Ψ` along one axis, holomorphic in `z`.
    fn log_axis(&self, z: C64, t: f64, axis: usize) -> C64 {
        let a = self.spread(t);
        let (h, m, s) = (self.units.hbar, self.units.mass, self.sigma0);
        let k = self.k0[axis];
        let v = h * k / m;
        let w = h * k * k / (2.0 * m);
        let d = z - self.center[axis] - v * t;
        -0.25 * (2.0 * PI * s * s).ln() - 0.5 * a.ln() - d * d / (4.0 * s * s * a)
            + C64::new(0.0, 1.0) * (k * z - w * t)
    }

    pub fn value(&self, x: f64, y: f64, t: f64) -> C64 {
        (self.log_axis(C64::new(x, 0.0), t, 0) + self.log_axis(C64::new(y, 0.0), t, 1)).exp()
    }

    /// Density width at time `t`, `σ₀ sqrt(1 + (ħt/2mσ₀²))²)`.
    pub fn sigma(&self, t: f64) -> f64 {
        self.sigma0 * self.spread(t).norm()
    }

    /// Packet centroid at time `t`.
    pub fn centroid(&self, t: f64) -> [f64; 2] {
        let v = self.units.hbar / self.units.mass;
        [
            self.center[0] + v * self.k0[0] * t,
            self.center[1] + v * self.k0[1] * t,
        ]
    }

    /// Bohmian position at `t` of the trajectory seeded at `x0`.
    pub fn bohm_position(&self, x0: [f64; 2], t: f64) -> [f64; 2] {
        let r = self.sigma(t) / self.sigma0;
        let c = self.centroid(t);
        [
            c[0] + (x0[0] - self.center[0]) * r,
            c[1] + (x0[1] - self.center[1]) * r,
        ]
    }

    /// Bohmian velocity `∇S/m` at `(x, y, t)`.
    pub fn bohm_velocity(&self, x: f64, y: f64, t: f64) -> [f64; 2] {
        let s = self.units.hbar * t / (2.0 * self.units.mass * self.sigma0.powi(2));
        let rate = s * s / (t * (1.0 + s * s));
        let rate = if t == 0.0 { 0.0 } else { rate };
        let c = self.centroid(t);
        let v = self.units.hbar / self.units.mass;
        [
            v * self.k0[0] + (x - c[0]) * rate,
            v * self.k0[1] + (y - c[1]) * rate,
        ]
    }

    /// `∇𝒮 = −iħ ∇Ψ/Ψ` at a complex point.
    pub fn complex_action_gradient(&self, z: CVec2, t: f64) -> CVec2 {
        let a = self.spread(t);
        let (h, m, s) = (self.units.hbar, self.units.mass, self.sigma0);
        let mut out = [C64::default(); 2];
        for (axis, o) in out.iter_mut().enumerate() {
            let k = self.k0[axis];
            let d = z.0[axis] - self.center[axis] - h * k / m * t;
            let dlog = -d / (2.0 * s * s * a) + C64::new(0.0, k);
            *o = C64::new(0.0, -h) * dlog;
        }
        CVec2(out)
    }

    pub fn on_grid(&self, grid: Grid2D, t: f64) -> WaveFunction {
        WaveFunction::from_fn(grid, t, |x, y| self.value(x, y, t))
    }
}

/// Exact free Gaussian at time `t` on `grid`.
pub fn analytic_free_gaussian(
    grid: Grid2D,
    sigma0: f64,
    k0: [f64; 2],
    center: [f64; 2],
    t: f64,
    units: Units,
) -> WaveFunction {
    FreeGaussian {
        sigma0,
        k0,
        center,
        units,
    }
    .on_grid(grid, t)
}

/// Ground state of the isotropic-or-not harmonic well, with its stationary phase.
pub fn harmonic_ground_state(grid: Grid2D, omega: [f64; 2], units: Units, t: f64) -> WaveFunction {
    coherent_state(grid, omega, [0.0, 0.0], units, t)
}

/// Coherent state displaced by `x0` at `t = 0` and released from rest.
pub fn coherent_state(
    grid: Grid2D,
    omega: [f64; 2],
    x0: [f64; 2],
    units: Units,
    t: f64,
) -> WaveFunction {
    let (h, m) = (units.hbar, units.mass);
    let axis = move |x: f64, k: usize| -> C64 {
        let w = omega[k];
        let xc = x0[k] * (w * t).cos();
        let pc = -m * w * x0[k] * (w * t).sin();
        let norm = (m * w / (PI * h)).powf(0.25);
        let re = -m * w * (x - xc).powi(2) / (2.0 * h);
        let im = pc * (x - 0.5 * xc) / h - 0.5 * w * t;
        C64::from_polar(norm * re.exp(), im)
    };
    WaveFunction::from_fn(grid, t, move |x, y| axis(x, 0) * axis(y, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schrodinger::init_gaussian;

    #[test]
    fn time_zero_matches_init() {
        let g = Grid2D::new(128, 12.0).unwrap();
        let a = analytic_free_gaussian(g, 1.0, [0.7, -0.2], [0.5, 1.0], 0.0, Units::default());
        let b = init_gaussian(g, [0.5, 1.0], 1.0, [0.7, -0.2]).unwrap();
        assert!(a.l2_distance(&b) < 1e-13);
    }

    #[test]
    fn spreading_width_and_boost() {
        let g = Grid2D::new(256, 20.0).unwrap();
        let u = Units::default();
        let psi = analytic_free_gaussian(g, 1.0, [0.0, 0.0], [0.0, 0.0], 2.0, u);
        let (mx, my, sx, _) = psi.moments();
        assert!(mx.abs() < 1e-12 && my.abs() < 1e-12);
        assert!((sx - 2f64.sqrt()).abs() < 1e-10);
        let psi = analytic_free_gaussian(g, 1.0, [1.0, 0.0], [0.0, 0.0], 1.0, u);
        let (mx, my, _, _) = psi.moments();
        assert!((mx - 1.0).abs() < 1e-10 && my.abs() < 1e-12);
    }

    #[test]
    fn ground_state_is_normalised() {
        let g = Grid2D::new(128, 10.0).unwrap();
        let psi = harmonic_ground_state(g, [1.0, 1.0], Units::default(), 0.0);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let (_, _, sx, _) = psi.moments();
        assert!((sx - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bohm_velocity_matches_position_derivative() {
        let fg = FreeGaussian {
            sigma0: 1.3,
            k0: [0.4, -0.1],
            center: [0.2, 0.0],
            units: Units {
                hbar: 1.0,
                mass: 2.0,
            },
        };
        let x0 = [1.1, -0.7];
        let (t, h) = (0.8, 1e-5);
        let p = |t| fg.bohm_position(x0, t);
        let fd = [
            (p(t + h)[0] - p(t - h)[0]) / (2.0 * h),
            (p(t + h)[1] - p(t - h)[1]) / (2.0 * h),
        ];
        let x = p(t);
        let v = fg.bohm_velocity(x[0], x[1], t);
        assert!((fd[0] - v[0]).abs() < 1e-9 && (fd[1] - v[1]).abs() < 1e-9);
    }
}

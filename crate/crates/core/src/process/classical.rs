use crate::cvec::CVec2;
use crate::error::{invalid, Result};

use super::velocity::VelocitySource;

/// Classical reference `dZ/dt = V(t)`, `Z(0) = z0`, by classical RK4.
///
/// The interval is split into `ceil(T/dt)` equal steps, so the requested
/// `dt` is an upper bound. Returns `(t, Z)` at every step including `t = 0`.
pub fn classical_trajectory(
    source: &impl VelocitySource,
    z0: CVec2,
    t_final: f64,
    dt: f64,
) -> Result<Vec<(f64, CVec2)>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be finite and > 0"));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(invalid("t_final", "must be finite and >= 0"));
    }
    let steps = ((t_final / dt) - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 {
        0.0
    } else {
        t_final / steps as f64
    };
    let mut out = Vec::with_capacity(steps + 1);
    let mut z = z0;
    out.push((0.0, z));
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = source.sample(t, &z)?;
        let k2 = source.sample(t + 0.5 * h, &(z + k1 * (0.5 * h)))?;
        let k3 = source.sample(t + 0.5 * h, &(z + k2 * (0.5 * h)))?;
        let k4 = source.sample(t + h, &(z + k3 * h))?;
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(((k + 1) as f64 * h, z));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::VelocityProgram;

    #[test]
    fn zero_velocity_is_constant() {
        let z0 = CVec2::from_parts([1.0, 2.0], [3.0, 4.0]);
        let traj = classical_trajectory(&VelocityProgram::zero(), z0, 1.0, 0.1).unwrap();
        assert!(traj.iter().all(|(_, z)| *z == z0));
    }

    #[test]
    fn circular_reaches_analytic_endpoint() {
        let pi = std::f64::consts::PI;
        let traj = classical_trajectory(&VelocityProgram::Circular, CVec2::ZERO, pi, 1e-3).unwrap();
        let worst = traj
            .iter()
            .map(|(t, z)| (*z - CVec2::real(t.sin(), 1.0 - t.cos())).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "worst = {worst}");
        let (t, z) = traj.last().unwrap();
        assert!((t - pi).abs() < 1e-12);
        assert!((*z - CVec2::real(0.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn polynomial_integral() {
        let v = VelocityProgram::Polynomial {
            coefficients: vec![CVec2::ZERO, CVec2::real(1.0, 0.0)],
        };
        let traj = classical_trajectory(&v, CVec2::ZERO, 2.0, 0.1).unwrap();
        let (_, z) = traj.last().unwrap();
        assert!((*z - CVec2::real(2.0, 0.0)).norm() < 1e-13);
    }
}

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

use super::field::VelocityField;
use super::frames::{FrameCursor, FrameWindow};

/// Bohmian path `dX/dt = Re 𝒱(X, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub seed: [f64; 2],
    /// Largest integrator step used.
    pub dt: f64,
    pub points: Vec<(f64, [f64; 2])>,
}

impl Trajectory {
    pub fn last(&self) -> (f64, [f64; 2]) {
        *self.points.last().expect("trajectory has its seed point")
    }

    /// Position at `t` by linear interpolation between recorded points.
    pub fn position_at(&self, t: f64) -> Option<[f64; 2]> {
        let k = self.points.partition_point(|p| p.0 < t);
        if k == 0 {
            return (self.points[0].0 == t).then_some(self.points[0].1);
        }
        let (t1, x1) = *self.points.get(k)?;
        let (t0, x0) = self.points[k - 1];
        let w = (t - t0) / (t1 - t0);
        Some([x0[0] + w * (x1[0] - x0[0]), x0[1] + w * (x1[1] - x0[1])])
    }
}

/// Number and size of the substeps that tile a window of length `span`.
pub(crate) fn substeps(span: f64, dt: f64) -> (usize, f64) {
    let n = ((span / dt) - 1e-9).ceil().max(1.0) as usize;
    (n, span / n as f64)
}

/// One classical fourth-order Runge-Kutta step inside the cursor's window.
pub(crate) fn rk4_step(cursor: &FrameWindow<'_>, t: f64, x: [f64; 2], h: f64) -> Result<[f64; 2]> {
    let at = |dt: f64, k: [f64; 2], c: f64| [x[0] + c * dt * k[0], x[1] + c * dt * k[1]];
    let k1 = cursor.bohm_velocity(t, x)?;
    let k2 = cursor.bohm_velocity(t + 0.5 * h, at(h, k1, 0.5))?;
    let k3 = cursor.bohm_velocity(t + 0.5 * h, at(h, k2, 0.5))?;
    let k4 = cursor.bohm_velocity(t + h, at(h, k3, 1.0))?;
    let next = [
        x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ];
    if !cursor.grid().contains(next) {
        return Err(Error::LeftDomain {
            t: t + h,
            x: next[0],
            y: next[1],
        });
    }
    Ok(next)
}

/// Integrate one trajectory across every window of `frames`.
///
/// Each window is tiled by equal steps no longer than `dt`.
pub fn integrate_trajectory<I>(frames: I, x0: [f64; 2], dt: f64) -> Result<Trajectory>
where
    I: Iterator<Item = Result<VelocityField>>,
{
    Ok(integrate_trajectories(frames, &[x0], dt)?.remove(0))
}

/// Integrate several trajectories in lockstep through a single pass over
/// `frames`, so a solver-backed stream is only evolved once.
pub fn integrate_trajectories<I>(frames: I, seeds: &[[f64; 2]], dt: f64) -> Result<Vec<Trajectory>>
where
    I: Iterator<Item = Result<VelocityField>>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be finite and > 0"));
    }
    if seeds.is_empty() {
        return Err(invalid("seeds", "need at least one seed"));
    }
    let mut cursor = FrameCursor::new(frames)?;
    let t0 = cursor.start();
    for &x0 in seeds {
        cursor.bohm_velocity(t0, x0)?;
    }
    let mut paths: Vec<Trajectory> = seeds
        .iter()
        .map(|&x0| Trajectory {
            seed: x0,
            dt: 0.0,
            points: vec![(t0, x0)],
        })
        .collect();
    loop {
        let (a, b) = (cursor.start(), cursor.end());
        let (n, h) = substeps(b - a, dt);
        let window = cursor.window();
        paths.par_iter_mut().try_for_each(|path| -> Result<()> {
            path.dt = path.dt.max(h);
            let mut x = path.last().1;
            for k in 0..n {
                let t = a + k as f64 * h;
                x = rk4_step(&window, t, x, h)?;
                let tk = if k + 1 == n {
                    b
                } else {
                    a + (k + 1) as f64 * h
                };
                path.points.push((tk, x));
            }
            Ok(())
        })?;
        if !cursor.advance()? {
            break;
        }
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pilot::{analytic_frames, uniform_times};
    use crate::schrodinger::{harmonic_ground_state, FreeGaussian, Grid2D, Units};

    #[test]
    fn substep_tiling() {
        assert_eq!(substeps(1.0, 0.25), (4, 0.25));
        assert_eq!(substeps(1.0, 0.3).0, 4);
        assert_eq!(substeps(0.1, 1.0), (1, 0.1));
    }

    #[test]
    fn stationary_in_ground_state() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let u = Units::default();
        let t_end = 2.0 * std::f64::consts::PI;
        let frames = analytic_frames(g, u, uniform_times(t_end, 50), |t| {
            harmonic_ground_state(g, [1.0, 1.0], u, t)
        });
        let tr = integrate_trajectory(frames, [0.7, -0.4], 0.05).unwrap();
        let (t, x) = tr.last();
        assert!((t - t_end).abs() < 1e-12);
        assert!((x[0] - 0.7).abs() < 1e-8 && (x[1] + 0.4).abs() < 1e-8);
    }

    #[test]
    fn analytic_spreading_on_coarse_grid() {
        let g = Grid2D::new(128, 16.0).unwrap();
        let u = Units::default();
        let fg = FreeGaussian {
            sigma0: 1.0,
            k0: [0.3, 0.0],
            center: [0.0, 0.0],
            units: u,
        };
        let frames = analytic_frames(g, u, uniform_times(1.0, 100), |t| fg.on_grid(g, t));
        let tr = integrate_trajectory(frames, [1.0, 0.5], 0.0025).unwrap();
        let (t, x) = tr.last();
        let e = fg.bohm_position([1.0, 0.5], t);
        assert!((x[0] - e[0]).abs() < 1e-4 * e[0].abs() && (x[1] - e[1]).abs() < 1e-4 * e[1].abs());
        assert_eq!(tr.position_at(0.0), Some([1.0, 0.5]));
        assert!(tr.position_at(2.0).is_none());
    }

    #[test]
    fn masked_region_terminates() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let u = Units::default();
        let frames = analytic_frames(g, u, uniform_times(1.0, 4), |t| {
            harmonic_ground_state(g, [1.0, 1.0], u, t)
        });
        assert!(matches!(
            integrate_trajectory(frames, [7.9, 0.0], 0.05),
            Err(Error::NodeRegion { .. })
        ));
    }

    #[test]
    fn lockstep_matches_single_runs() {
        let g = Grid2D::new(64, 8.0).unwrap();
        let u = Units::default();
        let fg = FreeGaussian {
            sigma0: 1.0,
            k0: [0.2, -0.1],
            center: [0.0, 0.0],
            units: u,
        };
        let frames = || analytic_frames(g, u, uniform_times(0.5, 20), |t| fg.on_grid(g, t));
        let seeds = [[1.0, 0.5], [-0.5, 0.25], [0.0, -1.0]];
        let all = integrate_trajectories(frames(), &seeds, 0.01).unwrap();
        for (tr, &x0) in all.iter().zip(&seeds) {
            assert_eq!(tr, &integrate_trajectory(frames(), x0, 0.01).unwrap());
        }
    }
}

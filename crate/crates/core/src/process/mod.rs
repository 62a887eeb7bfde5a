//! The deterministic four-point process and its mean.
//!
//! At step `n = 4q + r` every vertex moves by the cycle velocity `V(4qε)·ε`
//! plus the lattice jump `γ(sⁿu^j − sⁿ⁻¹u^j)`. The lattice jumps sum to zero
//! over the four vertices, so the mean moves by the drift alone and the
//! vertices re-coincide with it every fourth step.

mod classical;
mod params;
mod permutation;
mod velocity;

pub use classical::classical_trajectory;
pub use params::{gamma, gamma_at, real_amplitude, EpsilonMode, PhysParams};
pub use permutation::{vertex_offset, Permutation, UNIT_SQUARE};
pub use velocity::{VelocityProgram, VelocitySource};

use crate::cvec::CVec2;
use crate::error::{Error, Result};

/// Upper bound on the number of steps a single run may take.
pub const DEFAULT_STEP_BUDGET: u64 = 50_000_000;

/// Snapshot of the four vertices and their mean at step `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessState {
    pub n: u64,
    pub t: f64,
    /// Step size of the current cycle.
    pub epsilon: f64,
    pub vertices: [CVec2; 4],
    pub mean: CVec2,
    pub params: PhysParams,
    pub perm: Permutation,
    /// `V(4qε)` for the cycle containing `n`.
    pub cycle_velocity: CVec2,
    cycle_start: f64,
}

impl ProcessState {
    /// All four vertices start at `z0`; the first cycle velocity is sampled at `t = 0`.
    pub fn initial(
        params: PhysParams,
        perm: Permutation,
        z0: CVec2,
        source: &impl VelocitySource,
    ) -> Result<Self> {
        params.validate()?;
        if !z0.is_finite() {
            return Err(crate::error::invalid("z0", "must be finite"));
        }
        let v0 = source.sample(0.0, &z0)?;
        if !v0.is_finite() {
            return Err(Error::NonFiniteVelocity { t: 0.0 });
        }
        let epsilon = params.initial_epsilon(real_speed(&v0))?;
        Ok(ProcessState {
            n: 0,
            t: 0.0,
            epsilon,
            vertices: [z0; 4],
            mean: z0,
            params,
            perm,
            cycle_velocity: v0,
            cycle_start: 0.0,
        })
    }

    pub fn cycle_index(&self) -> u64 {
        self.n / 4
    }

    pub fn is_cycle_boundary(&self) -> bool {
        self.n.is_multiple_of(4)
    }

    fn constant_epsilon(&self) -> bool {
        self.params.epsilon_mode != EpsilonMode::DeBroglie
    }

    fn time_of(&self, n: u64) -> f64 {
        if self.constant_epsilon() {
            n as f64 * self.epsilon
        } else {
            self.cycle_start + (n - 4 * self.cycle_index()) as f64 * self.epsilon
        }
    }

    /// Time of the next velocity sample, if the next step closes a cycle.
    pub fn next_sample_time(&self) -> Option<f64> {
        (self.n + 1)
            .is_multiple_of(4)
            .then(|| self.time_of(self.n + 1))
    }

    /// Time reached by the next step.
    pub fn next_time(&self) -> f64 {
        self.time_of(self.n + 1)
    }

    /// Advance one step.
    ///
    /// The step that closes a cycle samples the velocity of the next cycle at
    /// its arrival time, evaluated at the pre-step gravity center.
    pub fn step(&self, source: &impl VelocitySource) -> Result<ProcessState> {
        let n1 = self.n + 1;
        let t1 = self.time_of(n1);
        let closes_cycle = n1.is_multiple_of(4);
        let v = if closes_cycle {
            let v = source.sample(t1, &self.mean)?;
            if !v.is_finite() {
                return Err(Error::NonFiniteVelocity { t: t1 });
            }
            v
        } else {
            self.cycle_velocity
        };

        let g = gamma_at(self.params.hbar, self.params.mass, self.epsilon);
        let drift = v * self.epsilon;
        let mut vertices = self.vertices;
        for (j, z) in vertices.iter_mut().enumerate() {
            let a = self.perm.image(n1, j);
            let b = self.perm.image(self.n, j);
            *z += drift + CVec2::scaled_lattice(g, [a[0] - b[0], a[1] - b[1]]);
        }

        let mut next = ProcessState {
            n: n1,
            t: t1,
            vertices,
            mean: self.mean + drift,
            ..self.clone()
        };
        if closes_cycle {
            next.cycle_velocity = v;
            next.cycle_start = t1;
            if self.params.epsilon_mode == EpsilonMode::DeBroglie {
                next.epsilon = self.params.de_broglie_epsilon(real_speed(&v), t1)?;
            }
        }
        Ok(next)
    }

    /// `Z̃ + γ(sⁿu^j − u^j)` for vertex `j`.
    pub fn expected_vertex(&self, j: usize) -> CVec2 {
        let g = gamma_at(self.params.hbar, self.params.mass, self.epsilon);
        self.mean + CVec2::scaled_lattice(g, vertex_offset(self.n, j, self.perm))
    }

    /// Largest deviation from the offset decomposition over the four vertices.
    pub fn offset_defect(&self) -> f64 {
        (0..4)
            .map(|j| (self.vertices[j] - self.expected_vertex(j)).norm())
            .fold(0.0, f64::max)
    }

    /// Distance between the stored mean and the average of the vertices.
    pub fn mean_defect(&self) -> f64 {
        let avg = self.vertices.iter().fold(CVec2::ZERO, |acc, z| acc + *z) * 0.25;
        (avg - self.mean).norm()
    }

    /// Magnitude used to turn defects into relative errors.
    pub fn scale(&self) -> f64 {
        let g = gamma_at(self.params.hbar, self.params.mass, self.epsilon).norm();
        self.mean.norm().max(g).max(f64::MIN_POSITIVE)
    }

    /// Real parts of the four vertex positions.
    pub fn real_vertices(&self) -> [[f64; 2]; 4] {
        self.vertices.map(|z| z.re())
    }
}

fn real_speed(v: &CVec2) -> f64 {
    let re = v.re();
    re[0].hypot(re[1])
}

/// Iterate the process from `z0` up to time `t_final`, keeping every state.
///
/// With a constant step the run holds `floor(T/ε) + 1` states. In de Broglie
/// mode the run stops at the last step not exceeding `t_final`.
pub fn run_process(
    params: PhysParams,
    perm: Permutation,
    source: &impl VelocitySource,
    z0: CVec2,
    t_final: f64,
) -> Result<Vec<ProcessState>> {
    run_process_with_budget(params, perm, source, z0, t_final, DEFAULT_STEP_BUDGET)
}

pub fn run_process_with_budget(
    params: PhysParams,
    perm: Permutation,
    source: &impl VelocitySource,
    z0: CVec2,
    t_final: f64,
    budget: u64,
) -> Result<Vec<ProcessState>> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(crate::error::invalid("t_final", "must be finite and > 0"));
    }
    let first = ProcessState::initial(params, perm, z0, source)?;
    if first.constant_epsilon() {
        let steps = (t_final / first.epsilon + 1e-9).floor() as u64;
        if steps > budget {
            return Err(Error::StepBudgetExceeded { steps, budget });
        }
        let mut states = Vec::with_capacity(steps as usize + 1);
        states.push(first);
        for _ in 0..steps {
            let next = states.last().expect("non-empty").step(source)?;
            states.push(next);
        }
        Ok(states)
    } else {
        let limit = t_final * (1.0 + 1e-12);
        let mut states = vec![first];
        loop {
            let last = states.last().expect("non-empty");
            if last.next_time() > limit {
                break;
            }
            if last.n >= budget {
                return Err(Error::StepBudgetExceeded {
                    steps: last.n + 1,
                    budget,
                });
            }
            let next = last.step(source)?;
            states.push(next);
        }
        Ok(states)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cvec::C64;

    fn unit(eps: f64) -> PhysParams {
        PhysParams::new(1.0, 1.0, eps).unwrap()
    }

    #[test]
    fn zero_velocity_returns_after_four_steps() {
        let run = run_process(
            unit(0.3),
            Permutation::SPlus,
            &VelocityProgram::zero(),
            CVec2::ZERO,
            1.2,
        )
        .unwrap();
        assert_eq!(run.len(), 5);
        for z in run[4].vertices {
            assert!(z.norm() < 1e-15);
        }
    }

    #[test]
    fn constant_real_velocity_moves_mean_by_euler() {
        let run = run_process(
            unit(0.25),
            Permutation::SPlus,
            &VelocityProgram::constant(CVec2::real(1.0, 0.0)),
            CVec2::ZERO,
            1.0,
        )
        .unwrap();
        let m = run[4].mean;
        assert!((m - CVec2::real(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn first_step_of_vertex_one() {
        let s0 = ProcessState::initial(
            unit(1.0),
            Permutation::SPlus,
            CVec2::ZERO,
            &VelocityProgram::zero(),
        )
        .unwrap();
        let s1 = s0.step(&VelocityProgram::zero()).unwrap();
        let want = CVec2::new(C64::new(0.0, 0.0), C64::new(-1.0, -1.0));
        assert!((s1.vertices[0] - want).norm() < 1e-15);
    }

    #[test]
    fn complex_velocity_components_decouple() {
        let v = CVec2::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let run = run_process(
            unit(1e-2),
            Permutation::SMinus,
            &VelocityProgram::constant(v),
            CVec2::ZERO,
            0.1,
        )
        .unwrap();
        let m = run.last().unwrap().mean;
        assert!(m.re()[1].abs() < 1e-15 && m.im()[0].abs() < 1e-15);
        assert!((m.re()[0] - 0.1).abs() < 1e-14);
        assert!((m.im()[1] - 0.1).abs() < 1e-14);
    }

    #[test]
    fn period_four_geometry() {
        let eps = 0.36;
        let a = real_amplitude(1.0, 1.0, eps);
        let run = run_process(
            unit(eps),
            Permutation::SPlus,
            &VelocityProgram::zero(),
            CVec2::real(0.5, -0.25),
            8.0 * eps,
        )
        .unwrap();
        for s in &run {
            let c = s.mean.re();
            let mut rel: Vec<[i64; 2]> = s
                .real_vertices()
                .iter()
                .map(|r| {
                    [
                        ((r[0] - c[0]) / a).round() as i64,
                        ((r[1] - c[1]) / a).round() as i64,
                    ]
                })
                .collect();
            rel.sort();
            let want: Vec<[i64; 2]> = match s.n % 4 {
                0 => vec![[0, 0]; 4],
                1 | 3 => vec![[-2, 0], [0, -2], [0, 2], [2, 0]],
                _ => vec![[-2, -2], [-2, 2], [2, -2], [2, 2]],
            };
            assert_eq!(rel, want, "n = {}", s.n);
        }
    }

    #[test]
    fn zero_velocity_cycle_boundaries_equal_initial() {
        let z0 = CVec2::from_parts([0.3, -1.0], [0.2, 0.0]);
        let run = run_process(
            unit(0.01),
            Permutation::SMinus,
            &VelocityProgram::zero(),
            z0,
            0.4,
        )
        .unwrap();
        for s in run.iter().filter(|s| s.is_cycle_boundary()) {
            for z in s.vertices {
                assert!((z - z0).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn circular_program_mean_tracks_ode() {
        let eps = 1e-3;
        let run = run_process(
            unit(eps),
            Permutation::SPlus,
            &VelocityProgram::Circular,
            CVec2::ZERO,
            1.0,
        )
        .unwrap();
        let worst = run
            .iter()
            .map(|s| {
                let exact = CVec2::real(s.t.sin(), 1.0 - s.t.cos());
                (s.mean - exact).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst < 2.0 * eps, "worst = {worst}");
    }

    #[test]
    fn de_broglie_refreshes_per_cycle() {
        let params = unit(1.0).with_mode(EpsilonMode::DeBroglie);
        let vel = VelocityProgram::Polynomial {
            coefficients: vec![CVec2::real(10.0, 0.0), CVec2::real(5.0, 0.0)],
        };
        let run = run_process(params, Permutation::SPlus, &vel, CVec2::ZERO, 0.2).unwrap();
        let h = 2.0 * std::f64::consts::PI;
        assert!((run[0].epsilon - h / 400.0).abs() < 1e-15);
        for w in run.windows(2) {
            if w[1].n % 4 != 0 {
                assert_eq!(w[0].epsilon, w[1].epsilon);
            }
            assert!(w[1].t > w[0].t);
        }
        let later = &run[8];
        let speed = 10.0 + 5.0 * later.t;
        assert!((later.epsilon - h / (4.0 * speed * speed)).abs() < 1e-14);
        assert!(run.iter().all(|s| s.offset_defect() < 1e-13));
    }

    #[test]
    fn de_broglie_floor_triggers_underflow() {
        let params = PhysParams {
            epsilon_floor: 1e-3,
            ..unit(1.0).with_mode(EpsilonMode::DeBroglie)
        };
        let vel = VelocityProgram::constant(CVec2::real(100.0, 0.0));
        let err = run_process(params, Permutation::SPlus, &vel, CVec2::ZERO, 1.0).unwrap_err();
        assert!(matches!(err, Error::EpsilonUnderflow { .. }));
    }

    #[test]
    fn budget_is_enforced() {
        let err = run_process_with_budget(
            unit(1e-3),
            Permutation::SPlus,
            &VelocityProgram::zero(),
            CVec2::ZERO,
            1.0,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::StepBudgetExceeded { .. }));
    }
}

//! Cycle-averaged observables of the real-part process.
//!
//! A cycle is the five states `n = 4q, …, 4q+4`; momenta use the forward
//! difference `p_n = m (r_{n+1} − r_n)/ε`, so the state closing the cycle is
//! needed for `n = 4q+3`.
//!
//! The 16-term angular momentum splits exactly into the mean-process part
//! `(1/4) Σ_n r̃_n ∧ p̃_n` and the fluctuation part
//! `(1/16) Σ_n Σ_j (r^j_n − r̃_n) ∧ (p^j_n − p̃_n)`: the cross terms vanish
//! because the vertex fluctuations sum to zero at every instant. Both parts are
//! computed directly; the fluctuation part is what stays at `∓ħ/2`.

use serde::Serialize;

use crate::cvec::wedge;
use crate::error::{Error, Result};
use crate::process::{Permutation, ProcessState, UNIT_SQUARE};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleObservables {
    pub cycle: u64,
    pub t_start: f64,
    pub sigma_z: f64,
    pub sigma_orbital: f64,
    pub sigma_intrinsic: f64,
    pub delta_x: f64,
    pub delta_px: f64,
    pub heisenberg_product: f64,
    /// Perimeters at `n = 4q, 4q+1, 4q+2, 4q+3`.
    pub string_lengths: [f64; 4],
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleSpin {
    pub total: f64,
    pub orbital: f64,
    pub intrinsic: f64,
}

fn check_cycle(states: &[ProcessState]) -> Result<()> {
    if states.len() != 5 {
        return Err(Error::MisalignedCycle {
            reason: format!("expected 5 states, got {}", states.len()),
        });
    }
    if !states[0].n.is_multiple_of(4) {
        return Err(Error::MisalignedCycle {
            reason: format!("first state has n = {} (not a multiple of 4)", states[0].n),
        });
    }
    if states.windows(2).any(|w| w[1].n != w[0].n + 1) {
        return Err(Error::MisalignedCycle {
            reason: "states are not consecutive".into(),
        });
    }
    Ok(())
}

/// Real positions, center and fluctuations of one cycle.
struct CycleKinematics {
    /// `r^j_n`, n = 0..=4
    r: [[[f64; 2]; 4]; 5],
    /// `r̃_n`
    center: [[f64; 2]; 5],
    mass: f64,
    eps: f64,
}

impl CycleKinematics {
    fn new(states: &[ProcessState]) -> Result<Self> {
        check_cycle(states)?;
        let mut r = [[[0.0; 2]; 4]; 5];
        let mut center = [[0.0; 2]; 5];
        for (k, s) in states.iter().enumerate() {
            r[k] = s.real_vertices();
            center[k] = s.mean.re();
        }
        Ok(CycleKinematics {
            r,
            center,
            mass: states[0].params.mass,
            eps: states[0].epsilon,
        })
    }

    fn momentum(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let f = self.mass / self.eps;
        [f * (b[0] - a[0]), f * (b[1] - a[1])]
    }

    fn fluct(&self, n: usize, j: usize) -> [f64; 2] {
        [
            self.r[n][j][0] - self.center[n][0],
            self.r[n][j][1] - self.center[n][1],
        ]
    }

    fn vertex_momentum(&self, n: usize, j: usize) -> [f64; 2] {
        self.momentum(self.r[n][j], self.r[n + 1][j])
    }

    fn center_momentum(&self, n: usize) -> [f64; 2] {
        self.momentum(self.center[n], self.center[n + 1])
    }

    fn fluct_momentum(&self, n: usize, j: usize) -> [f64; 2] {
        self.momentum(self.fluct(n, j), self.fluct(n + 1, j))
    }
}

/// Average angular momentum over the 16 (instant, vertex) pairs of a cycle.
pub fn cycle_spin(states: &[ProcessState]) -> Result<CycleSpin> {
    let k = CycleKinematics::new(states)?;
    let mut total = 0.0;
    let mut orbital = 0.0;
    let mut intrinsic = 0.0;
    for n in 0..4 {
        orbital += wedge(k.center[n], k.center_momentum(n));
        for j in 0..4 {
            total += wedge(k.r[n][j], k.vertex_momentum(n, j));
            intrinsic += wedge(k.fluct(n, j), k.fluct_momentum(n, j));
        }
    }
    Ok(CycleSpin {
        total: total / 16.0,
        orbital: orbital / 4.0,
        intrinsic: intrinsic / 16.0,
    })
}

/// `(ħ/16) Σ_j u^j ∧ s u^j`.
pub fn intrinsic_spin_closed_form(perm: Permutation, hbar: f64) -> f64 {
    let sum: i32 = (0..4)
        .map(|j| {
            let a = UNIT_SQUARE[j];
            let b = perm.image(1, j);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    hbar * f64::from(sum) / 16.0
}

/// Standard deviations `(Δx, Δp_x)` over the 16 pairs of a cycle.
pub fn cycle_uncertainties(states: &[ProcessState]) -> Result<(f64, f64)> {
    let k = CycleKinematics::new(states)?;
    let mut var_x = 0.0;
    let mut var_p = 0.0;
    for n in 0..4 {
        for j in 0..4 {
            var_x += k.fluct(n, j)[0].powi(2);
            var_p += k.fluct_momentum(n, j)[0].powi(2);
        }
    }
    Ok(((var_x / 16.0).sqrt(), (var_p / 16.0).sqrt()))
}

/// Perimeter of the closed real quadrilateral through vertices 1→2→3→4→1.
pub fn string_length(state: &ProcessState) -> f64 {
    let r = state.real_vertices();
    (0..4)
        .map(|j| {
            let (a, b) = (r[j], r[(j + 1) % 4]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .sum()
}

pub fn cycle_observables(states: &[ProcessState]) -> Result<CycleObservables> {
    let spin = cycle_spin(states)?;
    let (delta_x, delta_px) = cycle_uncertainties(states)?;
    Ok(CycleObservables {
        cycle: states[0].cycle_index(),
        t_start: states[0].t,
        sigma_z: spin.total,
        sigma_orbital: spin.orbital,
        sigma_intrinsic: spin.intrinsic,
        delta_x,
        delta_px,
        heisenberg_product: delta_x * delta_px,
        string_lengths: [0, 1, 2, 3].map(|k| string_length(&states[k])),
    })
}

/// Observables for every complete cycle of a run.
pub fn observe_run(states: &[ProcessState]) -> Result<Vec<CycleObservables>> {
    let start = states
        .iter()
        .position(ProcessState::is_cycle_boundary)
        .unwrap_or(states.len());
    states[start..]
        .windows(5)
        .step_by(4)
        .map(cycle_observables)
        .collect()
}

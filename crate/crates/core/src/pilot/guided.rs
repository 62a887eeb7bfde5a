use crate::cvec::CVec2;
use crate::error::{invalid, Error, Result};
use crate::process::{Permutation, PhysParams, ProcessState, DEFAULT_STEP_BUDGET};

use super::field::VelocityField;
use super::frames::FrameCursor;
use super::trajectory::{rk4_step, substeps, Trajectory};

/// Reference Bohm steps per frame window.
const REFERENCE_SUBSTEPS: f64 = 16.0;

/// A field-guided process together with the Bohm trajectory from the same seed.
#[derive(Clone, Debug)]
pub struct GuidedRun {
    pub states: Vec<ProcessState>,
    pub reference: Trajectory,
    /// `max_n |Re Z̃(t_n) − X(t_n)|`.
    pub max_gap: f64,
}

/// Run the four-point process with `𝒱(4qε)` read from the frames at the real
/// part of the gravity center, alongside the Bohm trajectory seeded at `x0`.
pub fn guide_process<I>(
    frames: I,
    params: PhysParams,
    perm: Permutation,
    x0: [f64; 2],
    t_end: f64,
) -> Result<GuidedRun>
where
    I: Iterator<Item = Result<VelocityField>>,
{
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", "must be finite and > 0"));
    }
    let mut cursor = FrameCursor::new(frames)?;
    let mut state = ProcessState::initial(params, perm, CVec2::real(x0[0], x0[1]), &cursor)?;
    let spacing = cursor.end() - cursor.start();
    if state.epsilon > spacing * (1.0 + 1e-12) {
        return Err(invalid(
            "epsilon",
            format!("{} exceeds the frame spacing {spacing}", state.epsilon),
        ));
    }
    let limit = t_end * (1.0 + 1e-12);
    let mut states = vec![state.clone()];
    let mut x = x0;
    let mut points = vec![(cursor.start(), x0)];
    let mut used: f64 = 0.0;
    loop {
        let (a, b) = (cursor.start(), cursor.end());
        let (n, h) = substeps(b - a, (b - a) / REFERENCE_SUBSTEPS);
        used = used.max(h);
        for k in 0..n {
            x = rk4_step(&cursor.window(), a + k as f64 * h, x, h)?;
            points.push((
                if k + 1 == n {
                    b
                } else {
                    a + (k + 1) as f64 * h
                },
                x,
            ));
        }
        let stop = b.min(limit);
        while state.next_time() <= stop * (1.0 + 1e-12) {
            if state.n >= DEFAULT_STEP_BUDGET {
                return Err(Error::StepBudgetExceeded {
                    steps: state.n + 1,
                    budget: DEFAULT_STEP_BUDGET,
                });
            }
            state = state.step(&cursor)?;
            states.push(state.clone());
        }
        if b >= limit || !cursor.advance()? {
            break;
        }
    }
    let reference = Trajectory {
        seed: x0,
        dt: used,
        points,
    };
    let mut max_gap: f64 = 0.0;
    for s in &states {
        let r = reference
            .position_at(s.t)
            .ok_or_else(|| Error::Frames(format!("no reference position at t = {}", s.t)))?;
        let c = s.mean.re();
        max_gap = max_gap.max((c[0] - r[0]).hypot(c[1] - r[1]));
    }
    Ok(GuidedRun {
        states,
        reference,
        max_gap,
    })
}

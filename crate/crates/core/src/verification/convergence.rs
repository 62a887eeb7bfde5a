use serde_json::json;

use crate::cvec::CVec2;
use crate::error::{invalid, Result};
use crate::process::{
    classical_trajectory, run_process, EpsilonMode, Permutation, PhysParams, VelocityProgram,
};
use crate::tolerances::{MEAN_RATE_MIN, VERTEX_RATE, VERTEX_RATE_TOL};

use super::rates::{RateReport, RateSample, RateTarget};

/// Reference substeps per process step.
const REFERENCE_REFINEMENT: usize = 10;

/// Sup-norm distances of the vertices and of their mean from the classical path.
fn sup_errors(
    params: PhysParams,
    perm: Permutation,
    velocity: &VelocityProgram,
    z0: CVec2,
    t_end: f64,
) -> Result<(f64, f64)> {
    let states = run_process(params, perm, velocity, z0, t_end)?;
    let last = states.last().expect("non-empty run");
    let reference = classical_trajectory(
        velocity,
        z0,
        last.t,
        params.epsilon / REFERENCE_REFINEMENT as f64,
    )?;
    if reference.len() != REFERENCE_REFINEMENT * last.n as usize + 1 {
        return Err(invalid(
            "epsilon",
            "reference grid does not align with the process",
        ));
    }
    let (mut vertex, mut mean): (f64, f64) = (0.0, 0.0);
    for s in &states {
        let z = reference[REFERENCE_REFINEMENT * s.n as usize].1;
        mean = mean.max((s.mean - z).norm());
        for v in &s.vertices {
            vertex = vertex.max((*v - z).norm());
        }
    }
    Ok((vertex, mean))
}

/// Fitted convergence rates of the vertices (≈ 1/2) and of the mean (≈ 1).
pub fn theorem1_convergence(
    params: PhysParams,
    perm: Permutation,
    velocity: &VelocityProgram,
    z0: CVec2,
    t_end: f64,
    epsilons: &[f64],
) -> Result<(RateReport, RateReport)> {
    if params.epsilon_mode != EpsilonMode::Fixed {
        return Err(invalid(
            "epsilon_mode",
            "the convergence sweep needs a fixed step",
        ));
    }
    let errors = epsilons
        .iter()
        .map(|&e| sup_errors(params.with_epsilon(e), perm, velocity, z0, t_end))
        .collect::<Result<Vec<_>>>()?;
    let samples = |pick: fn(&(f64, f64)) -> f64| -> Vec<RateSample> {
        epsilons
            .iter()
            .zip(&errors)
            .map(|(&e, err)| RateSample {
                eps_or_n: e,
                error: pick(err),
            })
            .collect()
    };
    let parameters = json!({
        "hbar": params.hbar,
        "mass": params.mass,
        "permutation": perm.label(),
        "velocity": velocity,
        "z0": z0,
        "T": t_end,
    });
    let vertices = RateReport::new(
        "vertex_convergence",
        parameters.clone(),
        samples(|e| e.0),
        RateTarget::Band {
            center: VERTEX_RATE,
            tolerance: VERTEX_RATE_TOL,
        },
    )?;
    let mean = RateReport::new(
        "mean_convergence",
        parameters,
        samples(|e| e.1),
        RateTarget::AtLeast(MEAN_RATE_MIN),
    )?;
    Ok((vertices, mean))
}

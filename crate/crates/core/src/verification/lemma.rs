use serde_json::json;

use crate::cvec::{CVec2, C64};
use crate::error::{invalid, Result};
use crate::process::{
    run_process, EpsilonMode, Permutation, PhysParams, ProcessState, VelocityProgram,
};
use crate::tolerances::{LEMMA_RATE, LEMMA_RATE_TOL};

use super::functions::{dynkin_apply, TestFunction};
use super::rates::{RateReport, RateSample};

fn vertex_mean(f: TestFunction, s: &ProcessState) -> C64 {
    s.vertices.iter().map(|z| f.value(z)).sum::<C64>() / 4.0
}

/// `max_q |[Y(4qε) − Y(4qε − ε)]/ε − Df(Z̃(4qε))|` over the cycle boundaries
/// `0 < 4qε ≤ T`, where `Y = (1/4)Σ_j f(Z^j)` and `Df` uses `𝒱(4qε)`.
pub fn lemma1_residual(
    f: TestFunction,
    params: PhysParams,
    perm: Permutation,
    velocity: &VelocityProgram,
    z0: CVec2,
    t_end: f64,
) -> Result<f64> {
    if params.epsilon_mode != EpsilonMode::Fixed {
        return Err(invalid(
            "epsilon_mode",
            "the expansion check needs a fixed step",
        ));
    }
    let cycles = (t_end / (4.0 * params.epsilon) + 1e-9).floor();
    if cycles < 1.0 {
        return Err(invalid("t_end", "shorter than one cycle"));
    }
    let states = run_process(params, perm, velocity, z0, cycles * 4.0 * params.epsilon)?;
    let eps = params.epsilon;
    let mut worst: f64 = 0.0;
    for w in states.windows(2).filter(|w| w[1].n % 4 == 0) {
        let (before, at) = (&w[0], &w[1]);
        let lhs = (vertex_mean(f, at) - vertex_mean(f, before)) / eps;
        let rhs = dynkin_apply(f, &at.mean, at.t, &at.cycle_velocity, &params);
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

/// Sweep `epsilons` and fit the rate at which the expansion residual vanishes.
pub fn lemma1_check(
    f: TestFunction,
    params: PhysParams,
    perm: Permutation,
    velocity: &VelocityProgram,
    t_end: f64,
    epsilons: &[f64],
) -> Result<RateReport> {
    let z0 = CVec2::real(0.5, -0.25);
    let samples = epsilons
        .iter()
        .map(|&e| {
            Ok(RateSample {
                eps_or_n: e,
                error: lemma1_residual(f, params.with_epsilon(e), perm, velocity, z0, t_end)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RateReport::new(
        format!("lemma1_{}", f.label()),
        json!({
            "function": f.label(),
            "hbar": params.hbar,
            "mass": params.mass,
            "permutation": perm.label(),
            "velocity": velocity,
            "T": t_end,
        }),
        samples,
        super::rates::RateTarget::Band {
            center: LEMMA_RATE,
            tolerance: LEMMA_RATE_TOL,
        },
    )
}

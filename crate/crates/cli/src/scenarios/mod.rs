//! Scenario runners. Each writes its artifacts through a [`Sink`] and returns
//! the acceptance checks it evaluated.

mod process;
mod waves;

use anyhow::{Context, Result};
use serde::Serialize;
use zitterlab_core::cvec::CVec2;
use zitterlab_core::process::{Permutation, PhysParams, VelocityProgram};
use zitterlab_core::schrodinger::Units;

use crate::config::{Scenario, ScenarioConfig};
use crate::report::{Check, Sink};

#[derive(Serialize)]
struct Outcome<'a> {
    scenario: &'a str,
    pass: bool,
    checks: &'a [Check],
}

/// Run the configured scenario, then write `config.json` and `checks.json`.
pub fn run_scenario(config: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let checks = match config.scenario {
        Scenario::ProcessFree => process::process_free(config, sink),
        Scenario::SpinTable => process::spin_table(config, sink),
        Scenario::HeisenbergTable => process::heisenberg_table(config, sink),
        Scenario::Convergence => process::convergence(config, sink),
        Scenario::Lemma1 => process::lemma1(config, sink),
        Scenario::FreeGaussian => waves::free_gaussian(config, sink),
        Scenario::HarmonicGround => waves::harmonic_ground(config, sink),
        Scenario::HarmonicCoherent => waves::harmonic_coherent(config, sink),
        Scenario::Equivariance => waves::equivariance(config, sink),
        Scenario::HjResidual => waves::hj_residual(config, sink),
        Scenario::GuidedProcess => waves::guided_process(config, sink),
    }
    .with_context(|| format!("scenario {}", config.scenario))?;
    sink.json("config.json", config)?;
    sink.json(
        "checks.json",
        &Outcome {
            scenario: config.scenario.name(),
            pass: checks.iter().all(|c| c.pass),
            checks: &checks,
        },
    )?;
    Ok(checks)
}

fn params(c: &ScenarioConfig, epsilon: f64) -> Result<PhysParams> {
    let p = &c.physics;
    let params = PhysParams {
        hbar: p.hbar,
        mass: p.mass,
        epsilon,
        epsilon_mode: p.epsilon_mode,
        light_speed: p.light_speed,
        epsilon_floor: p.epsilon_floor,
    };
    params.validate()?;
    Ok(params)
}

fn units(c: &ScenarioConfig) -> Units {
    Units {
        hbar: c.physics.hbar,
        mass: c.physics.mass,
    }
}

fn start_point(c: &ScenarioConfig, default: [f64; 2]) -> CVec2 {
    CVec2::from_parts(
        c.process.z0.unwrap_or(default),
        c.process.z0_im.unwrap_or([0.0, 0.0]),
    )
}

fn velocity_label(v: &VelocityProgram) -> &'static str {
    match v {
        VelocityProgram::Constant { value } if *value == CVec2::ZERO => "zero",
        VelocityProgram::Constant { .. } => "constant",
        VelocityProgram::Circular => "circular",
        VelocityProgram::Polynomial { .. } => "polynomial",
        VelocityProgram::Table { .. } => "table",
    }
}

/// File-name tag for one point of a permutation × velocity sweep.
fn sweep_tag(perm: Permutation, v: usize, n_velocities: usize) -> String {
    if n_velocities > 1 {
        format!("{}_v{v}", perm.label())
    } else {
        perm.label().to_string()
    }
}

use anyhow::Result;
use serde::Serialize;
use serde_json::json;
use zitterlab_core::cvec::CVec2;
use zitterlab_core::io::{observables_csv, process_csv};
use zitterlab_core::observables::{intrinsic_spin_closed_form, observe_run, CycleObservables};
use zitterlab_core::process::{run_process, Permutation, VelocityProgram};
use zitterlab_core::tolerances::{
    EXACT_IDENTITY, LEMMA_RATE, LEMMA_RATE_TOL, LINEAR_LEMMA_ROUNDOFF, MEAN_RATE_MIN,
    OFFSET_IDENTITY_REL, SCALING_SLOPE_TOL, VERTEX_RATE, VERTEX_RATE_TOL,
};
use zitterlab_core::verification::{
    lemma1_check, lemma1_residual, theorem1_convergence, RateReport, RateSample, RateTarget,
    TestFunction,
};

use super::{params, start_point, sweep_tag, velocity_label};
use crate::config::ScenarioConfig;
use crate::report::{Cell, Check, Csv, Sink};

const RATE_SWEEP: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

fn table_velocities() -> [VelocityProgram; 3] {
    [
        VelocityProgram::zero(),
        VelocityProgram::constant(CVec2::real(0.7, -0.4)),
        VelocityProgram::Circular,
    ]
}

pub fn process_free(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let perm = c.permutations()[0];
    let v = c.velocities(&[VelocityProgram::zero()]).remove(0);
    let p = params(c, c.physics.epsilon)?;
    let t_end = c.process.t_end.unwrap_or(1.0);
    let states = run_process(p, perm, &v, start_point(c, [0.0, 0.0]), t_end)?;
    let cycles = observe_run(&states)?;
    sink.text("process.csv", &process_csv(&states))?;
    sink.text("observables.csv", &observables_csv(&cycles))?;

    let offset = states
        .iter()
        .map(|s| s.offset_defect() / s.scale())
        .fold(0.0, f64::max);
    let (spin, product) = cycle_extremes(&cycles, perm, p.hbar);
    Ok(vec![
        Check::at_most(
            "offset_decomposition",
            offset,
            OFFSET_IDENTITY_REL,
            format!("{} states", states.len()),
        ),
        Check::at_most(
            "intrinsic_spin",
            spin,
            EXACT_IDENTITY,
            format!("{} cycles", cycles.len()),
        ),
        Check::at_most("heisenberg_product", product, EXACT_IDENTITY, "relative"),
    ])
}

/// Worst `|σ_int − σ_closed|` and worst relative `|ΔxΔp − ħ/2|` over cycles.
fn cycle_extremes(cycles: &[CycleObservables], perm: Permutation, hbar: f64) -> (f64, f64) {
    let expected = intrinsic_spin_closed_form(perm, hbar);
    cycles.iter().fold((0.0f64, 0.0f64), |(s, p), c| {
        (
            s.max((c.sigma_intrinsic - expected).abs()),
            p.max((c.heisenberg_product - hbar / 2.0).abs() / (hbar / 2.0)),
        )
    })
}

#[derive(Serialize)]
struct TableRow {
    permutation: Permutation,
    epsilon: f64,
    velocity: &'static str,
    cycles: usize,
    intrinsic_spin: f64,
    orbital_spin: f64,
    expected_spin: f64,
    max_spin_error: f64,
    delta_x: f64,
    delta_px: f64,
    product: f64,
    max_product_rel_error: f64,
}

/// Run every permutation × ε × velocity point for `cycles` cycles.
fn table(c: &ScenarioConfig, default_eps: &[f64]) -> Result<Vec<TableRow>> {
    let cycles = c.process.cycles.unwrap_or(100);
    let z0 = start_point(c, [0.3, -0.2]);
    let mut rows = Vec::new();
    for perm in c.permutations() {
        for eps in c.epsilons(default_eps) {
            for v in c.velocities(&table_velocities()) {
                let p = params(c, eps)?;
                let states = run_process(p, perm, &v, z0, 4.0 * cycles as f64 * eps)?;
                let obs = observe_run(&states)?;
                let first = obs
                    .first()
                    .ok_or_else(|| anyhow::anyhow!("no complete cycle at ε = {eps}"))?;
                let (max_spin_error, max_product_rel_error) = cycle_extremes(&obs, perm, p.hbar);
                rows.push(TableRow {
                    permutation: perm,
                    epsilon: eps,
                    velocity: velocity_label(&v),
                    cycles: obs.len(),
                    intrinsic_spin: first.sigma_intrinsic,
                    orbital_spin: first.sigma_orbital,
                    expected_spin: intrinsic_spin_closed_form(perm, p.hbar),
                    max_spin_error,
                    delta_x: first.delta_x,
                    delta_px: first.delta_px,
                    product: first.heisenberg_product,
                    max_product_rel_error,
                });
            }
        }
    }
    Ok(rows)
}

fn table_csv(rows: &[TableRow]) -> String {
    let mut csv = Csv::new(&[
        "permutation",
        "epsilon",
        "velocity",
        "cycles",
        "intrinsic_spin",
        "orbital_spin",
        "expected_spin",
        "max_spin_error",
        "delta_x",
        "delta_px",
        "product",
        "max_product_rel_error",
    ]);
    for r in rows {
        csv.row(&[
            Cell::S(r.permutation.label()),
            Cell::F(r.epsilon),
            Cell::S(r.velocity),
            Cell::U(r.cycles as u64),
            Cell::F(r.intrinsic_spin),
            Cell::F(r.orbital_spin),
            Cell::F(r.expected_spin),
            Cell::F(r.max_spin_error),
            Cell::F(r.delta_x),
            Cell::F(r.delta_px),
            Cell::F(r.product),
            Cell::F(r.max_product_rel_error),
        ]);
    }
    csv.finish()
}

pub fn spin_table(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let rows = table(c, &[c.physics.epsilon])?;
    sink.json("spin_table.json", &rows)?;
    sink.text("spin_table.csv", &table_csv(&rows))?;
    let worst = rows.iter().map(|r| r.max_spin_error).fold(0.0, f64::max);
    let cycles: usize = rows.iter().map(|r| r.cycles).sum();
    Ok(vec![Check::at_most(
        "intrinsic_spin",
        worst,
        EXACT_IDENTITY,
        format!("{} runs, {cycles} cycles", rows.len()),
    )])
}

pub fn heisenberg_table(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let rows = table(c, &[1e-1, 1e-2, 1e-3, 1e-4])?;
    sink.json("heisenberg_table.json", &rows)?;
    sink.text("heisenberg_table.csv", &table_csv(&rows))?;
    let worst = rows
        .iter()
        .map(|r| r.max_product_rel_error)
        .fold(0.0, f64::max);
    let mut checks = vec![Check::at_most(
        "heisenberg_product",
        worst,
        EXACT_IDENTITY,
        format!("relative, {} runs", rows.len()),
    )];

    // Δx against ε along the first permutation and velocity
    let head = (&rows[0].permutation, rows[0].velocity);
    let samples: Vec<RateSample> = rows
        .iter()
        .filter(|r| (&r.permutation, r.velocity) == head)
        .map(|r| RateSample {
            eps_or_n: r.epsilon,
            error: r.delta_x,
        })
        .collect();
    if samples.len() >= 2 {
        let report = RateReport::short(
            "delta_x_scaling",
            json!({ "permutation": head.0, "velocity": head.1 }),
            samples,
            RateTarget::Band {
                center: 0.5,
                tolerance: SCALING_SLOPE_TOL,
            },
        )?;
        sink.json("delta_x_scaling.json", &report)?;
        checks.push(Check::verdict(
            "delta_x_scaling",
            report.pass,
            report.fitted_rate,
            0.5,
            format!("slope within ±{SCALING_SLOPE_TOL:e}"),
        ));
    }
    Ok(checks)
}

pub fn convergence(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let eps = c.epsilons(&RATE_SWEEP);
    let velocities = c.velocities(&[VelocityProgram::Circular]);
    let z0 = start_point(c, [0.2, -0.1]);
    let t_end = c.process.t_end.unwrap_or(1.0);
    let mut checks = Vec::new();
    for perm in c.permutations() {
        for (k, v) in velocities.iter().enumerate() {
            let tag = sweep_tag(perm, k, velocities.len());
            let (vertex, mean) =
                theorem1_convergence(params(c, eps[0])?, perm, v, z0, t_end, &eps)?;
            sink.json(&format!("convergence_{tag}_vertex.json"), &vertex)?;
            sink.json(&format!("convergence_{tag}_mean.json"), &mean)?;
            checks.push(Check::verdict(
                &format!("vertex_rate_{tag}"),
                vertex.pass,
                vertex.fitted_rate,
                VERTEX_RATE,
                format!("target {VERTEX_RATE} ± {VERTEX_RATE_TOL}"),
            ));
            checks.push(Check::verdict(
                &format!("mean_rate_{tag}"),
                mean.pass,
                mean.fitted_rate,
                MEAN_RATE_MIN,
                format!("target ≥ {MEAN_RATE_MIN}"),
            ));
        }
    }
    Ok(checks)
}

#[derive(Serialize)]
struct LinearReport {
    check: String,
    parameters: serde_json::Value,
    samples: Vec<RateSample>,
    max_residual: f64,
    pass: bool,
}

pub fn lemma1(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let eps = c.epsilons(&RATE_SWEEP);
    let velocities = c.velocities(&[VelocityProgram::Circular]);
    let functions = c.process.functions.clone().unwrap_or_else(|| {
        vec![
            TestFunction::Quadratic,
            TestFunction::Product,
            TestFunction::Linear,
        ]
    });
    let t_end = c.process.t_end.unwrap_or(1.0);
    let base = params(c, eps[0])?;
    let mut checks = Vec::new();
    for perm in c.permutations() {
        for (k, v) in velocities.iter().enumerate() {
            let tag = sweep_tag(perm, k, velocities.len());
            for &f in &functions {
                let name = format!("lemma1_{}_{tag}", f.label());
                if f == TestFunction::Linear {
                    // the expansion is exact for affine f: no rate to fit
                    let samples = eps
                        .iter()
                        .map(|&e| {
                            Ok(RateSample {
                                eps_or_n: e,
                                error: lemma1_residual(
                                    f,
                                    base.with_epsilon(e),
                                    perm,
                                    v,
                                    CVec2::real(0.5, -0.25),
                                    t_end,
                                )?,
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let max_residual = samples.iter().map(|s| s.error).fold(0.0, f64::max);
                    let pass = max_residual < LINEAR_LEMMA_ROUNDOFF;
                    sink.json(
                        &format!("{name}.json"),
                        &LinearReport {
                            check: name.clone(),
                            parameters: json!({ "function": f, "permutation": perm, "T": t_end }),
                            samples,
                            max_residual,
                            pass,
                        },
                    )?;
                    checks.push(Check::below(
                        &name,
                        max_residual,
                        LINEAR_LEMMA_ROUNDOFF,
                        "roundoff only",
                    ));
                } else {
                    let r = lemma1_check(f, base, perm, v, t_end, &eps)?;
                    sink.json(&format!("{name}.json"), &r)?;
                    checks.push(Check::verdict(
                        &name,
                        r.pass,
                        r.fitted_rate,
                        LEMMA_RATE,
                        format!("target {LEMMA_RATE} ± {LEMMA_RATE_TOL}"),
                    ));
                }
            }
        }
    }
    Ok(checks)
}

//! The ten acceptance criteria, each at its stated tolerance.
//!
//! Runs as a plain binary so every criterion prints exactly one line,
//! whether it passes or not; the process exits non-zero on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use zitterlab_core::cvec::CVec2;
use zitterlab_core::observables::{intrinsic_spin_closed_form, observe_run};
use zitterlab_core::pilot::{
    analytic_frames, bin_density, bin_positions, ensemble_equivariance, guide_process,
    integrate_trajectory, sample_density, tv_distance, uniform_times, SolverFrames,
};
use zitterlab_core::process::{run_process, Permutation, PhysParams, VelocityProgram};
use zitterlab_core::schrodinger::{
    analytic_free_gaussian, coherent_state, harmonic_ground_state, init_gaussian, FreeGaussian,
    Grid2D, Potential, SplitStepSolver, Units,
};
use zitterlab_core::tolerances::*;
use zitterlab_core::verification::{
    eq15_consistency, fit_log_slope, free_gaussian_residual, hj_dt_study, hj_grid_study,
    lemma1_check, lemma1_residual, theorem1_convergence, RateReport, RateSample, RateTarget,
    TestFunction, TimeStencil,
};
use zitterlab_core::Result;

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

const SWEEP: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];

fn programs() -> [(&'static str, VelocityProgram); 3] {
    [
        ("zero", VelocityProgram::zero()),
        (
            "constant",
            VelocityProgram::constant(CVec2::real(0.7, -0.4)),
        ),
        ("circular", VelocityProgram::Circular),
    ]
}

/// 100-cycle runs over the permutation × ε × velocity sweep.
fn sweep_cycles(
    mut visit: impl FnMut(Permutation, f64, &zitterlab_core::observables::CycleObservables),
) -> Result<()> {
    for perm in Permutation::ALL {
        for eps in [1e-1, 1e-2, 1e-3] {
            for (_, v) in programs() {
                let params = PhysParams::new(1.0, 1.0, eps)?;
                let states = run_process(params, perm, &v, CVec2::real(0.3, -0.2), 400.0 * eps)?;
                let cycles = observe_run(&states)?;
                assert_eq!(cycles.len(), 100);
                for c in &cycles {
                    visit(perm, eps, c);
                }
            }
        }
    }
    Ok(())
}

fn spin_emergence() -> Outcome {
    let mut worst: f64 = 0.0;
    sweep_cycles(|perm, _, c| {
        let expected = intrinsic_spin_closed_form(perm, 1.0);
        worst = worst.max((c.sigma_intrinsic - expected).abs());
    })?;
    Ok((
        worst <= EXACT_IDENTITY,
        format!("max |σ_int ∓ ħ/2| = {worst:.2e} over 1800 cycles"),
    ))
}

fn heisenberg_product() -> Outcome {
    let mut worst: f64 = 0.0;
    sweep_cycles(|_, _, c| worst = worst.max((c.heisenberg_product - 0.5).abs() / 0.5))?;
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let dx: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let states = run_process(
                PhysParams::new(1.0, 1.0, e)?,
                Permutation::SPlus,
                &VelocityProgram::Circular,
                CVec2::ZERO,
                4.0 * e,
            )?;
            Ok(observe_run(&states)?[0].delta_x)
        })
        .collect::<Result<_>>()?;
    let slope = fit_log_slope(&eps, &dx)?;
    let ok = worst <= EXACT_IDENTITY && (slope - 0.5).abs() <= SCALING_SLOPE_TOL;
    Ok((
        ok,
        format!("max rel |ΔxΔp − ħ/2| = {worst:.2e}; Δx ∝ ε^{slope:.9}"),
    ))
}

fn convergence() -> Outcome {
    let (v, m) = theorem1_convergence(
        PhysParams::default(),
        Permutation::SPlus,
        &VelocityProgram::Circular,
        CVec2::real(0.2, -0.1),
        1.0,
        &SWEEP,
    )?;
    Ok((
        v.pass && m.pass,
        format!(
            "vertex rate {:.4}, mean rate {:.4}",
            v.fitted_rate, m.fitted_rate
        ),
    ))
}

fn expansion() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [TestFunction::Quadratic, TestFunction::Product] {
        let r = lemma1_check(
            f,
            PhysParams::default(),
            Permutation::SPlus,
            &VelocityProgram::Circular,
            1.0,
            &SWEEP,
        )?;
        ok &= r.pass;
        parts.push(format!("{} rate {:.4}", f.label(), r.fitted_rate));
    }
    let mut linear: f64 = 0.0;
    for e in SWEEP {
        linear = linear.max(lemma1_residual(
            TestFunction::Linear,
            PhysParams::default().with_epsilon(e),
            Permutation::SPlus,
            &VelocityProgram::Circular,
            CVec2::real(0.5, -0.25),
            1.0,
        )?);
    }
    ok &= linear < LINEAR_LEMMA_ROUNDOFF;
    parts.push(format!("linear residual {linear:.1e}"));
    Ok((ok, parts.join(", ")))
}

fn solver() -> Outcome {
    let g = Grid2D::new(256, 20.0)?;
    let u = Units::default();
    let mut psi = init_gaussian(g, [0.0, 0.0], 1.0, [0.0, 0.0])?;
    let s = SplitStepSolver::new(g, &Potential::Free, u, 1e-3)?;
    let n0 = psi.norm_sqr();
    s.evolve(&mut psi, 1000)?;
    let free = psi.relative_l2(&analytic_free_gaussian(
        g,
        1.0,
        [0.0, 0.0],
        [0.0, 0.0],
        1.0,
        u,
    ));
    let drift = (psi.norm_sqr() - n0).abs();

    let steps = 6283;
    let start = coherent_state(g, [1.0, 1.0], [2.0, 0.0], u, 0.0);
    let h = SplitStepSolver::new(g, &Potential::harmonic(1.0), u, 2.0 * PI / steps as f64)?;
    let mut c = start.clone();
    h.evolve(&mut c, steps)?;
    let ret = c.relative_l2(&start);
    let ok = free < FREE_GAUSSIAN_L2 && drift < NORM_DRIFT_PER_1000 && ret < COHERENT_RETURN_L2;
    Ok((
        ok,
        format!("free L2 {free:.2e}, norm drift {drift:.1e}/1000 steps, coherent return {ret:.2e}"),
    ))
}

fn hj_residual() -> Outcome {
    let g = Grid2D::new(256, 20.0)?;
    let p = FreeGaussian {
        sigma0: 1.0,
        k0: [0.0, 0.0],
        center: [0.0, 0.0],
        units: Units::default(),
    };
    let linf = [0.25, 0.5, 1.0]
        .iter()
        .map(|&t| Ok(free_gaussian_residual(&p, g, t, 1e-3, TimeStencil::FivePoint)?.linf))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let dt = hj_dt_study(
        &p,
        g,
        0.5,
        &[2e-2, 6e-3, 2e-3, 6e-4, 2e-4],
        TimeStencil::ThreePoint,
    )?;
    let n = hj_grid_study(&p, 20.0, &[32, 64, 128], 0.5, 1e-3, TimeStencil::FivePoint)?;
    let ok = linf < HJ_RESIDUAL_LINF && dt.pass && n.pass;
    let errs: Vec<String> = n
        .samples
        .iter()
        .map(|s| format!("{:.1e}", s.error))
        .collect();
    Ok((
        ok,
        format!(
            "L∞ {linf:.2e}; dt order {:.3}; N 32/64/128 → {}",
            dt.fitted_rate,
            errs.join("/")
        ),
    ))
}

fn free_frames() -> Result<SolverFrames> {
    let g = Grid2D::new(256, 20.0)?;
    let psi = init_gaussian(g, [0.0, 0.0], 1.0, [0.0, 0.0])?;
    Ok(SolverFrames::new(
        SplitStepSolver::new(g, &Potential::Free, Units::default(), 1e-3)?,
        psi,
        5,
        200,
    ))
}

fn bohm() -> Outcome {
    let fg = FreeGaussian {
        sigma0: 1.0,
        k0: [0.0, 0.0],
        center: [0.0, 0.0],
        units: Units::default(),
    };
    let mut spread: f64 = 0.0;
    for x0 in [[1.0, 0.0], [-0.5, 1.5], [2.0, 2.0]] {
        for &(t, x) in &integrate_trajectory(free_frames()?, x0, 1.25e-3)?.points {
            let e = fg.bohm_position(x0, t);
            spread = spread.max((x[0] - e[0]).hypot(x[1] - e[1]) / e[0].hypot(e[1]));
        }
    }
    let g = Grid2D::new(128, 10.0)?;
    let u = Units::default();
    let mut drift: f64 = 0.0;
    for x0 in [[0.0, 0.0], [1.0, -0.5], [-2.0, 1.5]] {
        let frames = analytic_frames(g, u, uniform_times(2.0 * PI, 200), |t| {
            harmonic_ground_state(g, [1.0, 1.0], u, t)
        });
        for (_, x) in integrate_trajectory(frames, x0, 2.0 * PI / 800.0)?.points {
            drift = drift.max((x[0] - x0[0]).hypot(x[1] - x0[1]));
        }
    }
    Ok((
        spread < BOHM_SPREADING_REL && drift < BOHM_STATIONARY_DRIFT,
        format!("spreading rel err {spread:.2e}; ground-state drift {drift:.1e}"),
    ))
}

fn equivariance() -> Outcome {
    let frames = free_frames()?;
    let g = frames.wave().grid;
    let rho0 = frames.wave().density();
    let baseline = tv_distance(
        &bin_positions(g, &sample_density(g, &rho0, 10_000, 2024)?)?,
        &bin_density(g, &rho0)?,
    );
    let report =
        ensemble_equivariance(frames, &rho0, 10_000, 2024, 5e-3, |f, _| f.wave().density())?;
    let failed_ok = report.failures as f64 <= ENSEMBLE_FAILURE_FRACTION * report.n as f64;
    Ok((
        report.tv_distance < EQUIVARIANCE_TV && baseline < EQUIVARIANCE_TV_BASELINE && failed_ok,
        format!(
            "TV(T=1) {:.4}, TV(T=0) {baseline:.4}, {} early terminations",
            report.tv_distance, report.failures
        ),
    ))
}

fn guided() -> Outcome {
    let mut samples = Vec::new();
    let mut spin: f64 = 0.0;
    let mut within = true;
    for e in [4e-3, 2e-3, 1e-3] {
        let run = guide_process(
            free_frames()?,
            PhysParams::new(1.0, 1.0, e)?,
            Permutation::SPlus,
            [1.0, 0.0],
            1.0,
        )?;
        for c in observe_run(&run.states)? {
            spin = spin.max((c.sigma_intrinsic + 0.5).abs());
        }
        within &= run.max_gap < GUIDED_GAP_PER_EPS * e;
        samples.push(RateSample {
            eps_or_n: e,
            error: run.max_gap,
        });
    }
    let r = RateReport::short(
        "guided_process",
        serde_json::Value::Null,
        samples,
        RateTarget::AtLeast(GUIDED_RATE_MIN),
    )?;
    Ok((
        r.pass && within && spin <= EXACT_IDENTITY,
        format!(
            "gap rate {:.4}; max |σ_int + ħ/2| = {spin:.1e}",
            r.fitted_rate
        ),
    ))
}

fn saddle() -> Outcome {
    let r = eq15_consistency(100, 2718, Units::default());
    Ok((
        r.pass,
        format!(
            "stationarity {:.1e}, quadratic rel err {:.1e}, {} signature failures / {}",
            r.max_stationarity_gradient, r.max_quadratic_rel_error, r.signature_failures, r.samples
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("spin emergence", spin_emergence),
        ("Heisenberg product", heisenberg_product),
        ("convergence rates", convergence),
        ("mean expansion", expansion),
        ("Schrödinger solver", solver),
        ("complex HJ residual", hj_residual),
        ("Bohmian trajectories", bohm),
        ("equivariance", equivariance),
        ("guided process", guided),
        ("saddle consistency", saddle),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        if !pass {
            failures += 1;
        }
        println!(
            "acceptance {:>2} {:<22} {}  ({detail}; {secs:.1} s)",
            k + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::f64::consts::PI;

use anyhow::{ensure, Result};
use serde::Serialize;
use serde_json::json;
use zitterlab_core::io::{encode_frame, process_csv, summary_csv, trajectory_csv};
use zitterlab_core::observables::{intrinsic_spin_closed_form, observe_run};
use zitterlab_core::pilot::{
    analytic_frames, bin_density, bin_positions, ensemble_equivariance, guide_process,
    integrate_trajectories, sample_density, tv_distance, uniform_times, SolverFrames, Trajectory,
    BINS,
};
use zitterlab_core::schrodinger::{
    coherent_state, harmonic_ground_state, init_gaussian, FrameSummary, FreeGaussian, Grid2D,
    Potential, SplitStepSolver, WaveFunction,
};
use zitterlab_core::tolerances::{
    BOHM_COHERENT_ABS, BOHM_SPREADING_REL, BOHM_STATIONARY_DRIFT, COHERENT_RETURN_L2,
    ENERGY_DRIFT_REL, ENSEMBLE_FAILURE_FRACTION, EQUIVARIANCE_TV, EQUIVARIANCE_TV_BASELINE,
    EXACT_IDENTITY, FREE_GAUSSIAN_L2, GUIDED_GAP_PER_EPS, GUIDED_RATE_MIN, HJ_RESIDUAL_LINF,
    NORM_DRIFT_PER_1000, SADDLE_STATIONARITY, STATIONARY_STATE_L2,
};
use zitterlab_core::verification::{
    eq15_consistency, free_gaussian_residual, hj_dt_study, hj_grid_study, RateReport, RateSample,
    RateTarget, TimeStencil,
};

use super::{params, units};
use crate::config::ScenarioConfig;
use crate::report::{Cell, Check, Csv, Sink};

/// A horizon split into `frames` intervals of `steps_per_frame` solver steps.
#[derive(Clone, Copy, Debug, PartialEq)]
struct FramePlan {
    t_end: f64,
    frames: usize,
    steps_per_frame: usize,
    dt: f64,
}

impl FramePlan {
    /// The step is shrunk, if needed, so that whole steps tile each frame.
    fn new(c: &ScenarioConfig, t_end: f64) -> Self {
        let frames = c.solver.frames;
        let steps_per_frame = ((t_end / (c.solver.dt * frames as f64)).round() as usize).max(1);
        FramePlan {
            t_end,
            frames,
            steps_per_frame,
            dt: t_end / (steps_per_frame * frames) as f64,
        }
    }

    fn steps(&self) -> usize {
        self.steps_per_frame * self.frames
    }

    fn spacing(&self) -> f64 {
        self.t_end / self.frames as f64
    }

    fn json(&self) -> serde_json::Value {
        json!({
            "T": self.t_end,
            "frames": self.frames,
            "steps_per_frame": self.steps_per_frame,
            "dt": self.dt,
        })
    }
}

fn grid(c: &ScenarioConfig) -> Result<Grid2D> {
    Ok(Grid2D::new(c.grid.n, c.grid.half_width)?)
}

fn packet(c: &ScenarioConfig) -> FreeGaussian {
    FreeGaussian {
        sigma0: c.packet.sigma0,
        k0: c.packet.k0,
        center: c.center(),
        units: units(c),
    }
}

/// Initial free packet and a solver on the configured grid.
fn free_setup(c: &ScenarioConfig, plan: &FramePlan) -> Result<(SplitStepSolver, WaveFunction)> {
    let g = grid(c)?;
    let psi = init_gaussian(g, c.center(), c.packet.sigma0, c.packet.k0)?;
    let solver = SplitStepSolver::new(g, &Potential::Free, units(c), plan.dt)?;
    Ok((solver, psi))
}

fn solver_frames(solver: &SplitStepSolver, psi: &WaveFunction, plan: &FramePlan) -> SolverFrames {
    SolverFrames::new(
        solver.clone(),
        psi.clone(),
        plan.steps_per_frame,
        plan.frames,
    )
}

/// Step `psi` frame by frame, recording summaries, the distance to `oracle`
/// and, on request, the binary frames.
fn evolve(
    c: &ScenarioConfig,
    sink: &mut Sink,
    solver: &SplitStepSolver,
    mut psi: WaveFunction,
    plan: &FramePlan,
    oracle: impl Fn(f64) -> WaveFunction,
) -> Result<(WaveFunction, Vec<FrameSummary>, f64)> {
    let mut summaries = Vec::with_capacity(plan.frames + 1);
    let mut distances = Csv::new(&["t", "relative_l2"]);
    let mut worst: f64 = 0.0;
    for k in 0..=plan.frames {
        if k > 0 {
            solver.evolve(&mut psi, plan.steps_per_frame)?;
            // pin the clock to the frame grid rather than the accumulated sum
            psi.time = k as f64 * plan.spacing();
        }
        summaries.push(solver.summary(&psi));
        let d = psi.relative_l2(&oracle(psi.time));
        worst = worst.max(d);
        distances.row(&[Cell::F(psi.time), Cell::F(d)]);
        if c.solver.export_frames {
            sink.bytes(&format!("frame_{k:05}.zlab"), &encode_frame(&psi))?;
        }
    }
    sink.text("summary.csv", &summary_csv(&summaries))?;
    sink.text("oracle_distance.csv", &distances.finish())?;
    Ok((psi, summaries, worst))
}

fn trajectory_dt(c: &ScenarioConfig, plan: &FramePlan) -> f64 {
    c.ensemble.dt.unwrap_or(plan.spacing() / 4.0)
}

/// Largest deviation of any recorded point from `expected(seed, t)`, optionally
/// relative to the expected position's magnitude.
fn path_error(
    paths: &[Trajectory],
    relative: bool,
    expected: impl Fn([f64; 2], f64) -> [f64; 2],
) -> f64 {
    let mut worst: f64 = 0.0;
    for p in paths {
        for &(t, x) in &p.points {
            let e = expected(p.seed, t);
            let mut d = (x[0] - e[0]).hypot(x[1] - e[1]);
            let scale = e[0].hypot(e[1]);
            if relative && scale > 0.0 {
                d /= scale;
            }
            worst = worst.max(d);
        }
    }
    worst
}

fn drift_checks(summaries: &[FrameSummary], plan: &FramePlan) -> (f64, f64) {
    let (first, last) = (summaries[0], summaries[summaries.len() - 1]);
    let norm = summaries
        .iter()
        .map(|s| (s.norm - first.norm).abs())
        .fold(0.0, f64::max)
        * 1000.0
        / plan.steps() as f64;
    let energy = (last.energy - first.energy).abs() / first.energy.abs().max(f64::MIN_POSITIVE);
    (norm, energy)
}

pub fn free_gaussian(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let plan = FramePlan::new(c, c.solver.t_end.unwrap_or(1.0));
    let (solver, psi0) = free_setup(c, &plan)?;
    let fg = packet(c);
    let g = solver.grid();
    let (psi, summaries, _) = evolve(c, sink, &solver, psi0.clone(), &plan, |t| fg.on_grid(g, t))?;
    let l2 = psi.relative_l2(&fg.on_grid(g, plan.t_end));
    let (norm, energy) = drift_checks(&summaries, &plan);

    let seeds = c.trajectory_seeds();
    let paths = integrate_trajectories(
        solver_frames(&solver, &psi0, &plan),
        &seeds,
        trajectory_dt(c, &plan),
    )?;
    sink.text("trajectories.csv", &trajectory_csv(&paths))?;
    let spread = path_error(&paths, true, |x0, t| fg.bohm_position(x0, t));
    sink.json(
        "free_gaussian.json",
        &json!({
            "plan": plan.json(),
            "relative_l2": l2,
            "norm_drift_per_1000": norm,
            "energy_rel_drift": energy,
            "spreading_rel_error": spread,
        }),
    )?;
    Ok(vec![
        Check::below(
            "oracle_l2",
            l2,
            FREE_GAUSSIAN_L2,
            format!("at T = {}", plan.t_end),
        ),
        Check::below(
            "norm_drift_per_1000",
            norm,
            NORM_DRIFT_PER_1000,
            format!("{} steps", plan.steps()),
        ),
        Check::below("energy_drift", energy, ENERGY_DRIFT_REL, "relative"),
        Check::below(
            "bohm_spreading",
            spread,
            BOHM_SPREADING_REL,
            format!("{} seeds", seeds.len()),
        ),
    ])
}

pub fn harmonic_ground(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let omega = c.solver.omega;
    let plan = FramePlan::new(
        c,
        c.solver.t_end.unwrap_or(2.0 * PI / omega[0].min(omega[1])),
    );
    let (g, u) = (grid(c)?, units(c));
    let solver = SplitStepSolver::new(g, &Potential::Harmonic { omega }, u, plan.dt)?;
    let psi0 = harmonic_ground_state(g, omega, u, 0.0);
    let (_, summaries, oracle) = evolve(c, sink, &solver, psi0, &plan, |t| {
        harmonic_ground_state(g, omega, u, t)
    })?;
    let (norm, _) = drift_checks(&summaries, &plan);
    let exact = 0.5 * u.hbar * (omega[0] + omega[1]);
    let energy = summaries
        .iter()
        .map(|s| (s.energy - exact).abs() / exact)
        .fold(0.0, f64::max);

    // Bohm paths through the exact stationary frames
    let seeds = c.trajectory_seeds();
    let frames = analytic_frames(g, u, uniform_times(plan.t_end, plan.frames), |t| {
        harmonic_ground_state(g, omega, u, t)
    });
    let paths = integrate_trajectories(frames, &seeds, trajectory_dt(c, &plan))?;
    sink.text("trajectories.csv", &trajectory_csv(&paths))?;
    let drift = path_error(&paths, false, |x0, _| x0);
    sink.json(
        "harmonic_ground.json",
        &json!({
            "plan": plan.json(),
            "omega": omega,
            "max_oracle_l2": oracle,
            "exact_energy": exact,
            "max_energy_rel_error": energy,
            "norm_drift_per_1000": norm,
            "trajectory_drift": drift,
        }),
    )?;
    Ok(vec![
        Check::below(
            "stationary_state_l2",
            oracle,
            STATIONARY_STATE_L2,
            "max over frames",
        ),
        Check::below(
            "ground_energy",
            energy,
            ENERGY_DRIFT_REL,
            "relative to ħ(ωx+ωy)/2",
        ),
        Check::below(
            "norm_drift_per_1000",
            norm,
            NORM_DRIFT_PER_1000,
            format!("{} steps", plan.steps()),
        ),
        Check::below(
            "bohm_stationary",
            drift,
            BOHM_STATIONARY_DRIFT,
            format!("{} seeds", seeds.len()),
        ),
    ])
}

pub fn harmonic_coherent(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let omega = c.solver.omega;
    let period = 2.0 * PI / omega[0];
    let plan = FramePlan::new(c, c.solver.t_end.unwrap_or(period));
    let (g, u) = (grid(c)?, units(c));
    let x0 = c.center();
    let solver = SplitStepSolver::new(g, &Potential::Harmonic { omega }, u, plan.dt)?;
    let psi0 = coherent_state(g, omega, x0, u, 0.0);
    let (psi, summaries, _) = evolve(c, sink, &solver, psi0.clone(), &plan, |t| {
        coherent_state(g, omega, x0, u, t)
    })?;
    let oracle = psi.relative_l2(&coherent_state(g, omega, x0, u, plan.t_end));
    let (norm, _) = drift_checks(&summaries, &plan);

    let seeds = c.trajectory_seeds();
    let paths = integrate_trajectories(
        solver_frames(&solver, &psi0, &plan),
        &seeds,
        trajectory_dt(c, &plan),
    )?;
    sink.text("trajectories.csv", &trajectory_csv(&paths))?;
    // the density translates rigidly along the classical orbit
    let centre = |t: f64| [x0[0] * (omega[0] * t).cos(), x0[1] * (omega[1] * t).cos()];
    let follow = path_error(&paths, false, |s, t| {
        let ct = centre(t);
        [s[0] + ct[0] - x0[0], s[1] + ct[1] - x0[1]]
    });

    let mut checks = vec![
        Check::below(
            "oracle_l2",
            oracle,
            COHERENT_RETURN_L2,
            format!("at T = {}", plan.t_end),
        ),
        Check::below(
            "norm_drift_per_1000",
            norm,
            NORM_DRIFT_PER_1000,
            format!("{} steps", plan.steps()),
        ),
        Check::below(
            "bohm_classical_orbit",
            follow,
            BOHM_COHERENT_ABS,
            format!("{} seeds", seeds.len()),
        ),
    ];
    let periods = plan.t_end / period;
    let returns =
        omega[0] == omega[1] && (periods - periods.round()).abs() < 1e-9 && periods.round() >= 1.0;
    let mut report = json!({
        "plan": plan.json(),
        "omega": omega,
        "x0": x0,
        "oracle_l2": oracle,
        "norm_drift_per_1000": norm,
        "bohm_orbit_error": follow,
    });
    if returns {
        let ret = psi.relative_l2(&psi0);
        report["return_l2"] = json!(ret);
        checks.push(Check::below(
            "return_l2",
            ret,
            COHERENT_RETURN_L2,
            format!("{periods:.0} period(s)"),
        ));
    }
    sink.json("harmonic_coherent.json", &report)?;
    Ok(checks)
}

pub fn equivariance(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let plan = FramePlan::new(c, c.solver.t_end.unwrap_or(1.0));
    let (solver, psi0) = free_setup(c, &plan)?;
    let g = solver.grid();
    ensure!(
        g.n % BINS == 0,
        "grid.n = {} is not a multiple of {BINS} bins",
        g.n
    );
    let (n, seed) = (c.ensemble.n, c.ensemble.seed);
    let rho0 = psi0.density();
    let baseline = tv_distance(
        &bin_positions(g, &sample_density(g, &rho0, n, seed)?)?,
        &bin_density(g, &rho0)?,
    );
    let dt = c.ensemble.dt.unwrap_or(plan.spacing());
    let frames = solver_frames(&solver, &psi0, &plan);
    let report = ensemble_equivariance(frames, &rho0, n, seed, dt, |f, _| f.wave().density())?;
    sink.json("equivariance.json", &report)?;
    let mut bins = Csv::new(&["bin_x", "bin_y", "empirical", "expected"]);
    for (k, (e, q)) in report.empirical.iter().zip(&report.expected).enumerate() {
        bins.row(&[
            Cell::U((k / BINS) as u64),
            Cell::U((k % BINS) as u64),
            Cell::F(*e),
            Cell::F(*q),
        ]);
    }
    sink.text("histogram.csv", &bins.finish())?;
    let failures = report.failures as f64 / n as f64;
    Ok(vec![
        Check::below(
            "tv_distance",
            report.tv_distance,
            EQUIVARIANCE_TV,
            format!("T = {}", plan.t_end),
        ),
        Check::below("tv_baseline", baseline, EQUIVARIANCE_TV_BASELINE, "T = 0"),
        Check::at_most(
            "early_terminations",
            failures,
            ENSEMBLE_FAILURE_FRACTION,
            format!("{} of {n}", report.failures),
        ),
    ])
}

#[derive(Serialize)]
struct HjRow {
    t: f64,
    dt: f64,
    stencil: TimeStencil,
    linf: f64,
    l2: f64,
    centered_linf: f64,
    unmasked: usize,
}

pub fn hj_residual(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let g = grid(c)?;
    let fg = packet(c);
    let h = &c.hj;
    let dt = c.solver.dt;
    let rows = h
        .times
        .iter()
        .map(|&t| {
            let s = free_gaussian_residual(&fg, g, t, dt, h.stencil)?;
            Ok(HjRow {
                t,
                dt,
                stencil: h.stencil,
                linf: s.linf,
                l2: s.l2,
                centered_linf: s.centered_linf,
                unmasked: s.unmasked,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sink.json("hj_residual.json", &rows)?;
    let linf = rows.iter().map(|r| r.linf).fold(0.0, f64::max);

    let mut sorted = h.times.clone();
    sorted.sort_by(f64::total_cmp);
    let t_mid = sorted[sorted.len() / 2];
    let dt_study = hj_dt_study(&fg, g, t_mid, &h.dt_sweep, TimeStencil::ThreePoint)?;
    sink.json("hj_dt_refinement.json", &dt_study)?;
    let n_study = hj_grid_study(&fg, g.half_width, &h.n_sweep, t_mid, dt, h.stencil)?;
    sink.json("hj_grid_refinement.json", &n_study)?;
    let saddle = eq15_consistency(h.saddle_samples, h.saddle_seed, units(c));
    sink.json("eq15_consistency.json", &saddle)?;

    Ok(vec![
        Check::below(
            "hj_linf",
            linf,
            HJ_RESIDUAL_LINF,
            format!("{} times, dt = {dt}", rows.len()),
        ),
        Check::verdict(
            "hj_dt_order",
            dt_study.pass,
            dt_study.fitted_rate,
            TimeStencil::ThreePoint.order(),
            "three-point stencil",
        ),
        Check::verdict(
            "hj_grid_refinement",
            n_study.pass,
            n_study.fitted_rate,
            0.0,
            "monotone decrease",
        ),
        Check::verdict(
            "saddle_consistency",
            saddle.pass,
            saddle.max_stationarity_gradient,
            SADDLE_STATIONARITY,
            format!(
                "{} signature failures / {}",
                saddle.signature_failures, saddle.samples
            ),
        ),
    ])
}

pub fn guided_process(c: &ScenarioConfig, sink: &mut Sink) -> Result<Vec<Check>> {
    let plan = FramePlan::new(c, c.solver.t_end.unwrap_or(1.0));
    let (solver, psi0) = free_setup(c, &plan)?;
    let eps = c.epsilons(&[4e-3, 2e-3, 1e-3]);
    let x0 = c.process.z0.unwrap_or([1.0, 0.0]);
    let mut checks = Vec::new();
    for perm in c.permutations() {
        let tag = perm.label();
        let expected = intrinsic_spin_closed_form(perm, c.physics.hbar);
        let mut samples = Vec::new();
        let mut spin: f64 = 0.0;
        let mut gap_ratio: f64 = 0.0;
        for (k, &e) in eps.iter().enumerate() {
            let frames = solver_frames(&solver, &psi0, &plan);
            let run = guide_process(frames, params(c, e)?, perm, x0, plan.t_end)?;
            for o in observe_run(&run.states)? {
                spin = spin.max((o.sigma_intrinsic - expected).abs());
            }
            gap_ratio = gap_ratio.max(run.max_gap / e);
            sink.text(
                &format!("guided_{tag}_{k}_process.csv"),
                &process_csv(&run.states),
            )?;
            sink.text(
                &format!("guided_{tag}_{k}_reference.csv"),
                &trajectory_csv(&[run.reference]),
            )?;
            samples.push(RateSample {
                eps_or_n: e,
                error: run.max_gap,
            });
        }
        let report = RateReport::short(
            format!("guided_process_{tag}"),
            json!({ "permutation": perm, "x0": x0, "plan": plan.json() }),
            samples,
            RateTarget::AtLeast(GUIDED_RATE_MIN),
        )?;
        sink.json(&format!("guided_process_{tag}.json"), &report)?;
        checks.push(Check::verdict(
            &format!("gap_rate_{tag}"),
            report.pass,
            report.fitted_rate,
            GUIDED_RATE_MIN,
            "fitted rate of the gap in ε",
        ));
        checks.push(Check::below(
            &format!("gap_per_eps_{tag}"),
            gap_ratio,
            GUIDED_GAP_PER_EPS,
            "max gap / ε",
        ));
        checks.push(Check::at_most(
            &format!("intrinsic_spin_{tag}"),
            spin,
            EXACT_IDENTITY,
            "every guided cycle",
        ));
    }
    Ok(checks)
}

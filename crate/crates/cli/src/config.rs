//! TOML scenario configuration.
//!
//! One file describes one scenario. Every section except `scenario` is
//! optional; a missing key takes the default listed on its field. Keys that
//! only some scenarios read are ignored by the others, but unknown keys are
//! always rejected.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use zitterlab_core::process::{EpsilonMode, Permutation, VelocityProgram};
use zitterlab_core::verification::{TestFunction, TimeStencil};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    ProcessFree,
    SpinTable,
    HeisenbergTable,
    Convergence,
    Lemma1,
    FreeGaussian,
    HarmonicGround,
    HarmonicCoherent,
    Equivariance,
    HjResidual,
    GuidedProcess,
}

impl Scenario {
    pub const ALL: [Scenario; 11] = [
        Scenario::ProcessFree,
        Scenario::SpinTable,
        Scenario::HeisenbergTable,
        Scenario::Convergence,
        Scenario::Lemma1,
        Scenario::FreeGaussian,
        Scenario::HarmonicGround,
        Scenario::HarmonicCoherent,
        Scenario::Equivariance,
        Scenario::HjResidual,
        Scenario::GuidedProcess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::ProcessFree => "process_free",
            Scenario::SpinTable => "spin_table",
            Scenario::HeisenbergTable => "heisenberg_table",
            Scenario::Convergence => "convergence",
            Scenario::Lemma1 => "lemma1",
            Scenario::FreeGaussian => "free_gaussian",
            Scenario::HarmonicGround => "harmonic_ground",
            Scenario::HarmonicCoherent => "harmonic_coherent",
            Scenario::Equivariance => "equivariance",
            Scenario::HjResidual => "hj_residual",
            Scenario::GuidedProcess => "guided_process",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Scenario::ProcessFree => "single four-point process run; per-step and per-cycle CSV",
            Scenario::SpinTable => "intrinsic spin per cycle over permutation × ε × velocity",
            Scenario::HeisenbergTable => "Δx·Δp_x per cycle and the √ε scaling of Δx",
            Scenario::Convergence => {
                "vertex and mean convergence rates against the classical limit"
            }
            Scenario::Lemma1 => "mean-process expansion residual rate for test functions",
            Scenario::FreeGaussian => {
                "split-step solver vs analytic free packet, Bohm spreading law"
            }
            Scenario::HarmonicGround => {
                "stationary harmonic ground state and frozen Bohm trajectories"
            }
            Scenario::HarmonicCoherent => {
                "coherent state against its oracle and its return after a period"
            }
            Scenario::Equivariance => {
                "seeded ensemble transported through solver frames vs |Ψ(T)|²"
            }
            Scenario::HjResidual => {
                "complex Hamilton-Jacobi residual, refinement orders, saddle check"
            }
            Scenario::GuidedProcess => "field-guided process vs Bohm reference as ε shrinks",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A scalar or a list in the file; always a list once parsed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub process: Process,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default)]
    pub packet: Packet,
    #[serde(default)]
    pub ensemble: Ensemble,
    #[serde(default)]
    pub hj: Hj,
    #[serde(default)]
    pub output: Output,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    /// 1.
    pub hbar: f64,
    /// 1.
    pub mass: f64,
    /// 0.01.
    pub epsilon: f64,
    /// `fixed`.
    pub epsilon_mode: EpsilonMode,
    /// 1; only read in `compton` mode.
    pub light_speed: f64,
    /// 0 (disabled).
    pub epsilon_floor: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            hbar: 1.0,
            mass: 1.0,
            epsilon: 0.01,
            epsilon_mode: EpsilonMode::Fixed,
            light_speed: 1.0,
            epsilon_floor: 0.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Process {
    /// `s_plus`; a list sweeps both cycles in the table scenarios.
    pub permutation: Option<OneOrMany<Permutation>>,
    /// Per-scenario default; `{ kind = "circular" }` etc.
    pub velocity: Option<OneOrMany<VelocityProgram>>,
    /// ε sweep; defaults per scenario.
    pub epsilons: Option<Vec<f64>>,
    /// Real part of the initial point; defaults per scenario.
    pub z0: Option<[f64; 2]>,
    /// Imaginary part of the initial point, 0 by default.
    pub z0_im: Option<[f64; 2]>,
    /// Horizon; defaults per scenario.
    pub t_end: Option<f64>,
    /// Cycles per table run, 100.
    pub cycles: Option<u64>,
    /// Lemma test functions, `[quadratic, product, linear]`.
    pub functions: Option<Vec<TestFunction>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    /// Nodes per axis, a power of two; 256.
    pub n: usize,
    /// The box is `[−L, L)²`; 20.
    pub half_width: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            n: 256,
            half_width: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    /// 1e-3.
    pub dt: f64,
    /// Horizon; 1 (one period in `harmonic_*`).
    pub t_end: Option<f64>,
    /// Number of frame intervals over the horizon; 200.
    pub frames: usize,
    /// Harmonic frequencies, `[1, 1]`.
    pub omega: [f64; 2],
    /// Also write every frame as a binary `.zlab` file.
    pub export_frames: bool,
}

impl Default for Solver {
    fn default() -> Self {
        Solver {
            dt: 1e-3,
            t_end: None,
            frames: 200,
            omega: [1.0, 1.0],
            export_frames: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Packet {
    /// 1.
    pub sigma0: f64,
    /// Origin; `[2, 0]` is the default displacement of `harmonic_coherent`.
    pub center: Option<[f64; 2]>,
    /// `[0, 0]`.
    pub k0: [f64; 2],
}

impl Default for Packet {
    fn default() -> Self {
        Packet {
            sigma0: 1.0,
            center: None,
            k0: [0.0, 0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ensemble {
    /// Ensemble size, 10⁴.
    #[serde(rename = "N")]
    pub n: usize,
    /// The single source of randomness, 2024.
    pub seed: u64,
    /// RK4 step for transported particles and single trajectories; 5e-3.
    pub dt: Option<f64>,
    /// Seeds of individually written Bohm trajectories.
    pub trajectories: Option<Vec<[f64; 2]>>,
}

impl Default for Ensemble {
    fn default() -> Self {
        Ensemble {
            n: 10_000,
            seed: 2024,
            dt: None,
            trajectories: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hj {
    /// `five_point`.
    pub stencil: TimeStencil,
    /// Residual evaluation times, `[0.25, 0.5, 1]`.
    pub times: Vec<f64>,
    /// Three-point time-step sweep.
    pub dt_sweep: Vec<f64>,
    /// Grid sweep at fixed `half_width`.
    pub n_sweep: Vec<usize>,
    /// Saddle-check sample count, 100.
    pub saddle_samples: usize,
    /// Saddle-check seed, 2718.
    pub saddle_seed: u64,
}

impl Default for Hj {
    fn default() -> Self {
        Hj {
            stencil: TimeStencil::FivePoint,
            times: vec![0.25, 0.5, 1.0],
            dt_sweep: vec![2e-2, 6e-3, 2e-3, 6e-4, 2e-4],
            n_sweep: vec![32, 64, 128],
            saddle_samples: 100,
            saddle_seed: 2718,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    /// Relative to the working directory; `--out` overrides it.
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            dir: PathBuf::from("zitterlab-out"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown field `{field}`")]
    UnknownField { field: String, line: usize },

    #[error("line {line}: unknown scenario `{name}`")]
    UnknownScenario { name: String, line: usize },

    #[error("line {line}: `{field}` out of range: {reason}")]
    OutOfRange {
        field: String,
        reason: String,
        line: usize,
    },

    #[error("missing required field `{field}`")]
    MissingRequired { field: String },

    #[error("line {line}: {message}")]
    Syntax { message: String, line: usize },
}

impl ScenarioConfig {
    pub fn permutations(&self) -> Vec<Permutation> {
        self.process
            .permutation
            .as_ref()
            .map_or(vec![Permutation::SPlus], OneOrMany::to_vec)
    }

    pub fn velocities(&self, default: &[VelocityProgram]) -> Vec<VelocityProgram> {
        self.process
            .velocity
            .as_ref()
            .map_or_else(|| default.to_vec(), OneOrMany::to_vec)
    }

    pub fn epsilons(&self, default: &[f64]) -> Vec<f64> {
        self.process
            .epsilons
            .clone()
            .unwrap_or_else(|| default.to_vec())
    }

    pub fn center(&self) -> [f64; 2] {
        let fallback = match self.scenario {
            Scenario::HarmonicCoherent => [2.0, 0.0],
            _ => [0.0, 0.0],
        };
        self.packet.center.unwrap_or(fallback)
    }

    pub fn trajectory_seeds(&self) -> Vec<[f64; 2]> {
        self.ensemble
            .trajectories
            .clone()
            .unwrap_or_else(|| vec![[1.0, 0.0], [-0.5, 1.5], [2.0, 2.0]])
    }
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| classify(text, &e))?;
    validate(&config, text)?;
    Ok(config)
}

fn classify(text: &str, e: &toml::de::Error) -> ConfigError {
    let message = e.message().trim().to_string();
    let line = e.span().map_or(0, |s| line_of(text, s.start));
    if let Some(field) = backticked(&message, "unknown field") {
        return ConfigError::UnknownField { field, line };
    }
    if let Some(field) = backticked(&message, "missing field") {
        return ConfigError::MissingRequired { field };
    }
    if let Some(name) = backticked(&message, "unknown variant") {
        let at_scenario = text
            .lines()
            .nth(line.saturating_sub(1))
            .is_some_and(|l| l.trim_start().starts_with("scenario"));
        if at_scenario {
            return ConfigError::UnknownScenario { name, line };
        }
    }
    ConfigError::Syntax { message, line }
}

/// The first backticked word after `prefix`, if the message starts with it.
fn backticked(message: &str, prefix: &str) -> Option<String> {
    let rest = message.strip_prefix(prefix)?;
    let start = rest.find('`')? + 1;
    let len = rest[start..].find('`')?;
    Some(rest[start..start + len].to_string())
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of `key` inside `[section]` (or the root table for `""`); 0 if the
/// key was defaulted rather than written.
fn locate(text: &str, section: &str, key: &str) -> usize {
    let mut current = "";
    for (k, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if let Some(h) = l.strip_prefix('[').and_then(|h| h.split(']').next()) {
            current = h.trim();
            continue;
        }
        if current == section {
            if let Some(rest) = l.strip_prefix(key) {
                if rest.trim_start().starts_with('=') {
                    return k + 1;
                }
            }
        }
    }
    0
}

struct Checker<'a> {
    text: &'a str,
}

impl Checker<'_> {
    fn fail(&self, section: &str, key: &str, reason: impl Into<String>) -> ConfigError {
        let field = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        ConfigError::OutOfRange {
            field,
            reason: reason.into(),
            line: locate(self.text, section, key),
        }
    }

    fn positive(&self, section: &str, key: &str, v: f64) -> Result<(), ConfigError> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(self.fail(section, key, format!("must be finite and > 0, got {v}")))
        }
    }

    fn finite(&self, section: &str, key: &str, v: &[f64]) -> Result<(), ConfigError> {
        if v.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(self.fail(section, key, "must be finite"))
        }
    }

    fn sweep(
        &self,
        section: &str,
        key: &str,
        v: &[f64],
        min_len: usize,
    ) -> Result<(), ConfigError> {
        if v.len() < min_len {
            return Err(self.fail(section, key, format!("needs at least {min_len} values")));
        }
        for &x in v {
            self.positive(section, key, x)?;
        }
        Ok(())
    }

    fn grid_size(&self, section: &str, key: &str, n: usize) -> Result<(), ConfigError> {
        if n.is_power_of_two() && (16..=4096).contains(&n) {
            Ok(())
        } else {
            Err(self.fail(
                section,
                key,
                format!("must be a power of two in [16, 4096], got {n}"),
            ))
        }
    }
}

fn validate(c: &ScenarioConfig, text: &str) -> Result<(), ConfigError> {
    let ck = Checker { text };
    let p = &c.physics;
    ck.positive("physics", "hbar", p.hbar)?;
    ck.positive("physics", "mass", p.mass)?;
    ck.positive("physics", "epsilon", p.epsilon)?;
    ck.positive("physics", "light_speed", p.light_speed)?;
    if !(p.epsilon_floor >= 0.0 && p.epsilon_floor.is_finite()) {
        return Err(ck.fail("physics", "epsilon_floor", "must be finite and ≥ 0"));
    }

    let pr = &c.process;
    if let Some(e) = &pr.epsilons {
        ck.sweep("process", "epsilons", e, 1)?;
    }
    if let Some(t) = pr.t_end {
        ck.positive("process", "t_end", t)?;
    }
    if pr.cycles == Some(0) {
        return Err(ck.fail("process", "cycles", "must be ≥ 1"));
    }
    if let Some(z) = pr.z0 {
        ck.finite("process", "z0", &z)?;
    }
    if let Some(z) = pr.z0_im {
        ck.finite("process", "z0_im", &z)?;
    }
    if matches!(&pr.permutation, Some(OneOrMany::Many(v)) if v.is_empty()) {
        return Err(ck.fail("process", "permutation", "must not be empty"));
    }
    if matches!(&pr.velocity, Some(OneOrMany::Many(v)) if v.is_empty()) {
        return Err(ck.fail("process", "velocity", "must not be empty"));
    }
    if matches!(&pr.functions, Some(v) if v.is_empty()) {
        return Err(ck.fail("process", "functions", "must not be empty"));
    }
    if c.scenario == Scenario::ProcessFree {
        if c.permutations().len() != 1 {
            return Err(ck.fail(
                "process",
                "permutation",
                "process_free runs a single permutation",
            ));
        }
        if c.velocities(&[]).len() > 1 {
            return Err(ck.fail(
                "process",
                "velocity",
                "process_free runs a single velocity program",
            ));
        }
    }
    let fixed_only = matches!(
        c.scenario,
        Scenario::Convergence | Scenario::Lemma1 | Scenario::GuidedProcess
    );
    if fixed_only && p.epsilon_mode != EpsilonMode::Fixed {
        return Err(ck.fail(
            "physics",
            "epsilon_mode",
            format!("{} sweeps ε and needs `fixed`", c.scenario),
        ));
    }
    match c.scenario {
        Scenario::Convergence | Scenario::Lemma1 => {
            if let Some(e) = &pr.epsilons {
                ck.sweep("process", "epsilons", e, 4)?;
            }
        }
        Scenario::GuidedProcess => {
            if let Some(e) = &pr.epsilons {
                ck.sweep("process", "epsilons", e, 2)?;
            }
        }
        _ => {}
    }

    ck.grid_size("grid", "n", c.grid.n)?;
    ck.positive("grid", "half_width", c.grid.half_width)?;

    let s = &c.solver;
    ck.positive("solver", "dt", s.dt)?;
    if let Some(t) = s.t_end {
        ck.positive("solver", "t_end", t)?;
    }
    if s.frames == 0 {
        return Err(ck.fail("solver", "frames", "must be ≥ 1"));
    }
    ck.positive("solver", "omega", s.omega[0])?;
    ck.positive("solver", "omega", s.omega[1])?;

    ck.positive("packet", "sigma0", c.packet.sigma0)?;
    if let Some(ctr) = c.packet.center {
        ck.finite("packet", "center", &ctr)?;
    }
    ck.finite("packet", "k0", &c.packet.k0)?;

    let en = &c.ensemble;
    if en.n < 1000 {
        return Err(ck.fail("ensemble", "N", format!("must be ≥ 1000, got {}", en.n)));
    }
    if let Some(dt) = en.dt {
        ck.positive("ensemble", "dt", dt)?;
    }
    if let Some(t) = &en.trajectories {
        for x in t {
            ck.finite("ensemble", "trajectories", x)?;
        }
    }

    let h = &c.hj;
    if h.times.is_empty() {
        return Err(ck.fail("hj", "times", "must not be empty"));
    }
    for &t in &h.times {
        ck.positive("hj", "times", t)?;
    }
    ck.sweep("hj", "dt_sweep", &h.dt_sweep, 2)?;
    if h.n_sweep.len() < 2 {
        return Err(ck.fail("hj", "n_sweep", "needs at least 2 values"));
    }
    for &n in &h.n_sweep {
        ck.grid_size("hj", "n_sweep", n)?;
    }
    if h.saddle_samples == 0 {
        return Err(ck.fail("hj", "saddle_samples", "must be ≥ 1"));
    }
    Ok(())
}

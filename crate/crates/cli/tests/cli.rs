use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn zitterlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zitterlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

/// Write `config` and run it with `--out`; returns the output and the out dir.
fn run(config: &str, extra: &[&str]) -> (Output, TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = zitterlab(&args, dir.path());
    (o, dir, out)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn list_scenarios_and_version() {
    let tmp = TempDir::new().unwrap();
    let o = zitterlab(&["list-scenarios"], tmp.path());
    assert_eq!(code(&o), 0);
    let listing = String::from_utf8(o.stdout).unwrap();
    for name in [
        "process_free",
        "spin_table",
        "heisenberg_table",
        "convergence",
        "lemma1",
        "free_gaussian",
        "harmonic_ground",
        "harmonic_coherent",
        "equivariance",
        "hj_residual",
        "guided_process",
    ] {
        assert!(
            listing.lines().any(|l| l.starts_with(name)),
            "{name} missing"
        );
    }
    let o = zitterlab(&["version"], tmp.path());
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .starts_with("zitterlab "));
}

#[test]
fn unknown_field_is_a_config_error_with_its_line() {
    let (o, _d, out) = run("scenario = \"spin_table\"\n[physics]\nplanck = 2.0\n", &[]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(
        e.contains("unknown field `planck`") && e.contains("line 3"),
        "{e}"
    );
    assert!(!out.exists(), "nothing is written for a rejected config");
}

#[test]
fn negative_epsilon_is_out_of_range() {
    let (o, _d, _) = run(
        "scenario = \"process_free\"\n[physics]\nepsilon = -1\n",
        &[],
    );
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(
        e.contains("physics.epsilon") && e.contains("out of range"),
        "{e}"
    );
}

#[test]
fn out_of_scope_scenario_is_rejected() {
    let (o, _d, _) = run("scenario = \"pauli3d\"\n", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown scenario `pauli3d`"));
}

#[test]
fn missing_scenario_and_missing_file() {
    let (o, _d, _) = run("[physics]\nhbar = 1.0\n", &[]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing required field `scenario`"));
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&zitterlab(&["run", "absent.toml"], tmp.path())), 2);
}

#[test]
fn spin_table_rows_carry_both_signs() {
    let config = r#"
scenario = "spin_table"
[process]
permutation = ["s_plus", "s_minus"]
epsilons = [0.1, 0.01, 0.001]
"#;
    let (o, _d, out) = run(config, &["--check"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = json(&out.join("spin_table.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2 * 3 * 3);
    for r in rows {
        let expected = match r["permutation"].as_str().unwrap() {
            "s_plus" => -0.5,
            "s_minus" => 0.5,
            p => panic!("{p}"),
        };
        assert!((r["intrinsic_spin"].as_f64().unwrap() - expected).abs() <= 1e-12);
        assert!(r["max_spin_error"].as_f64().unwrap() <= 1e-12);
        assert_eq!(r["cycles"], 100);
    }
    assert!(out.join("spin_table.csv").exists());
    assert_eq!(json(&out.join("checks.json"))["pass"], true);
}

#[test]
fn heisenberg_sweep_products_are_half() {
    let (o, _d, out) = run("scenario = \"heisenberg_table\"\n", &["--check"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = json(&out.join("heisenberg_table.json"));
    let eps: Vec<f64> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["epsilon"].as_f64().unwrap())
        .collect();
    for e in [1e-1, 1e-2, 1e-3, 1e-4] {
        assert!(eps.contains(&e));
    }
    for r in rows.as_array().unwrap() {
        assert!((r["product"].as_f64().unwrap() - 0.5).abs() <= 1e-12);
    }
    let scaling = json(&out.join("delta_x_scaling.json"));
    assert!((scaling["fitted_rate"].as_f64().unwrap() - 0.5).abs() <= 1e-6);
}

#[test]
fn convergence_writes_rate_reports() {
    let (o, _d, out) = run("scenario = \"convergence\"\n", &["--check"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let vertex = json(&out.join("convergence_s_plus_vertex.json"));
    let rate = vertex["fitted_rate"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&rate), "{rate}");
    assert_eq!(vertex["samples"].as_array().unwrap().len(), 5);
    assert!(vertex["samples"][0]["eps_or_N"].is_number());
    let mean = json(&out.join("convergence_s_plus_mean.json"));
    assert!(mean["fitted_rate"].as_f64().unwrap() >= 0.95);
}

/// A deliberately coarse step: the coherent state misses its oracle.
const COARSE_COHERENT: &str = r#"
scenario = "harmonic_coherent"
[grid]
n = 64
half_width = 8.0
[solver]
dt = 0.05
frames = 20
"#;

#[test]
fn failed_checks_exit_one_only_with_check() {
    let (o, _d, out) = run(COARSE_COHERENT, &["--check"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL oracle_l2"));
    assert_eq!(json(&out.join("checks.json"))["pass"], false);
    let (o, _d, _) = run(COARSE_COHERENT, &[]);
    assert_eq!(code(&o), 0);
}

#[test]
fn domain_errors_exit_three() {
    // σ₀ = 1 is narrower than four cells of a 16-node grid on [−20, 20)
    let (o, _d, _) = run("scenario = \"free_gaussian\"\n[grid]\nn = 16\n", &[]);
    assert_eq!(code(&o), 3);
    let e = stderr(&o);
    assert!(
        e.contains("runtime error") && e.contains("free_gaussian"),
        "{e}"
    );
}

#[test]
fn output_dir_from_config_or_flag() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("p.toml"),
        "scenario = \"process_free\"\n[output]\ndir = \"from_config\"\n",
    )
    .unwrap();
    assert_eq!(code(&zitterlab(&["run", "p.toml"], dir.path())), 0);
    assert!(dir.path().join("from_config/process.csv").exists());
    assert!(dir.path().join("from_config/observables.csv").exists());
    assert_eq!(
        code(&zitterlab(&["run", "p.toml", "--out", "flag"], dir.path())),
        0
    );
    assert!(dir.path().join("flag/process.csv").exists());
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let configs = [
        "scenario = \"process_free\"\n[process]\nvelocity = { kind = \"circular\" }\n",
        r#"
scenario = "equivariance"
[grid]
n = 64
half_width = 8.0
[solver]
dt = 0.005
t_end = 0.5
frames = 20
export_frames = true
[ensemble]
N = 2000
seed = 7
"#,
    ];
    for config in configs {
        let (a, _da, out_a) = run(config, &[]);
        let (b, _db, out_b) = run(config, &[]);
        assert_eq!((code(&a), code(&b)), (0, 0), "{}", stderr(&a));
        let (sa, sb) = (snapshot(&out_a), snapshot(&out_b));
        assert!(sa.len() >= 3);
        assert_eq!(sa, sb);
    }
}

#[test]
fn no_temporary_files_left_behind() {
    let (o, _d, out) = run("scenario = \"lemma1\"\n", &[]);
    assert_eq!(code(&o), 0);
    for (name, _) in snapshot(&out) {
        assert!(!name.starts_with('.'), "stray {name}");
    }
}

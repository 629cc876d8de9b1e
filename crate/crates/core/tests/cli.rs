use std::path::Path;
use std::process::{Command, Output};

use spinfreeze::experiments::{preset_names, ScenarioConfig};

fn spinfreeze(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spinfreeze"));
    cmd.args(args).env_remove("SPINFREEZE_OUT");
    if let Some(dir) = env_out {
        cmd.env("SPINFREEZE_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SHORT: &str = r#"
name = "short"
model = "two_spin"

[two_spin]
omega_1 = 2.0
omega_2 = 0.1
v0 = 2.0

[initial_state]
kind = "basis"
label = "gg"

[grid]
t_end = 1.0
record_every_us = 0.01
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn list_and_show() {
    let o = spinfreeze(&["list"], None);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().to_string())
        .collect();
    let mut expected: Vec<String> = preset_names().into_iter().map(String::from).collect();
    expected.sort();
    assert_eq!(names, expected);

    let o = spinfreeze(&["show", "fig5d"], None);
    assert_eq!(code(&o), 0);
    let cfg = ScenarioConfig::from_toml(&stdout(&o)).unwrap();
    assert_eq!(cfg.name, "fig5d");
}

#[test]
fn usage_and_lookup_errors_exit_1() {
    assert_eq!(code(&spinfreeze(&["--help"], None)), 0);
    assert_eq!(code(&spinfreeze(&["--version"], None)), 0);
    assert_eq!(code(&spinfreeze(&[], None)), 1);
    assert_eq!(code(&spinfreeze(&["run", "--frame", "sideways", "fig2a"], None)), 1);
    let o = spinfreeze(&["run", "fig9z"], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fig2a"));
    assert_eq!(code(&spinfreeze(&["show", "nope"], None)), 1);
}

#[test]
fn run_writes_outputs_and_manifest_last() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let out = dir.path().join("out");
    let o = spinfreeze(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--svg",
            "--seed",
            "5",
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.join("short_populations.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_us,P_gg,P_ge,P_eg,P_ee,trace_err,min_eig"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    for r in &rows {
        assert!((r[1..5].iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
    let svg = std::fs::read_to_string(out.join("short.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "short");
    assert_eq!(manifest["seed"], 5);
    assert_eq!(manifest["seed_override"], 5);
    assert_eq!(manifest["files"].as_array().unwrap().len(), 2);
    assert!(manifest["metrics"]["max_leakage"].as_f64().unwrap() < 0.05);
}

#[test]
fn discord_flag_and_env_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SHORT.replace("t_end = 1.0", "t_end = 0.5"));
    let o = spinfreeze(
        &["run", "--config", cfg.to_str().unwrap(), "--discord"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("short_discord.csv")).unwrap();
    assert!(text.starts_with("t_us,mutual_info,classical_corr,discord\n"));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn integration_failure_exits_2_and_clears_stale_manifest() {
    let dir = tempfile::tempdir().unwrap();
    // a step this coarse drives RK4 out of the positive cone
    let cfg = write_config(dir.path(), &SHORT.replace("t_end = 1.0", "t_end = 1.0\ndt = 0.2"));
    let out = dir.path().join("out");
    std::fs::create_dir_all(&out).unwrap();
    std::fs::write(out.join("manifest.json"), "{}").unwrap();
    let o = spinfreeze(
        &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn io_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&spinfreeze(&["run", "--config", missing.to_str().unwrap()], None)),
        3
    );

    let cfg = write_config(dir.path(), SHORT);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = spinfreeze(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            blocker.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn invalid_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SHORT.replace("omega_2 = 0.1", "omega_2 = -0.1"));
    let o = spinfreeze(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 1);
    let cfg = write_config(dir.path(), "this is not toml = = =");
    let o = spinfreeze(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 1);
}

#[test]
fn batch_runs_each_preset_into_its_own_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinfreeze(
        &[
            "batch",
            "fig2a",
            "fig2d",
            "--jobs",
            "2",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["fig2a", "fig2d"] {
        assert!(dir.path().join(name).join("manifest.json").exists());
        assert!(dir.path().join(name).join(format!("{name}_populations.csv")).exists());
    }
    let o = spinfreeze(
        &["batch", "fig2a", "bogus", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 1);
}

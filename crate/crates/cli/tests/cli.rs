use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sqzc_cli::recipes::{recipe, Recipe, RecipeOptions};
use sqzc_cli::ScenarioConfig;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sqzc-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn sqzc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqzc")).args(args).env_remove("SQZC_THREADS").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    serde_json::from_str(String::from_utf8_lossy(&o.stderr).lines().last().unwrap()).unwrap()
}

/// Rows of a CSV as header-keyed maps.
fn rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    r.records().map(|rec| header.iter().cloned().zip(rec.unwrap().iter().map(String::from)).collect()).collect()
}

#[test]
fn vacuum_config_gives_half() {
    let dir = scratch("vacuum");
    let cfg = write(
        &dir,
        "c.json",
        r#"{"circuit": {"kappa1": 50, "eps1_mag": 0}, "truncation": {"n1": 2, "n2": 4, "include_qubit": false},
            "solver": {"tier": "both"}, "output": {"name": "vac"}}"#,
    );
    let o = sqzc(&["run", "--config", &cfg, "--out-dir", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&dir.join("vac.csv"));
    assert_eq!(r.len(), 1);
    for col in ["g_var_min", "f_var_min"] {
        let v: f64 = r[0][col].parse().unwrap();
        assert!((v - 0.5).abs() <= 1e-10, "{col} = {v}");
    }
}

#[test]
fn sweep_rows_are_ordered_and_deterministic() {
    let dir = scratch("sweep");
    let text = r#"{"circuit": {"kappa1": 50, "eps1_mag": 0},
        "sweep": [{"variable": "eps1_mag", "start": 2, "stop": 6, "points": 3}],
        "output": {"name": "s", "formats": ["csv", "svg"], "reference_line": 0.25}}"#;
    let cfg = write(&dir, "c.json", text);
    let (a, b) = (dir.join("a"), dir.join("b"));
    for out in [&a, &b] {
        let o = sqzc(&["run", "--config", &cfg, "--out-dir", out.to_str().unwrap(), "--threads", "1"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let bytes = fs::read(a.join("s.csv")).unwrap();
    assert_eq!(bytes, fs::read(b.join("s.csv")).unwrap());
    let r = rows(&a.join("s.csv"));
    let eps: Vec<f64> = r.iter().map(|row| row["eps1_mag"].parse().unwrap()).collect();
    assert_eq!(eps, [2.0, 4.0, 6.0]);
    let var: Vec<f64> = r.iter().map(|row| row["g_var_min"].parse().unwrap()).collect();
    assert!(var[0] > var[1] && var[1] > var[2]);
    let svg = fs::read_to_string(a.join("s.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("stroke-dasharray"));
}

#[test]
fn config_errors_exit_2() {
    let dir = scratch("bad");
    let cfg = write(&dir, "c.json", r#"{"circuit": {"kappa1": 50, "eps1_mag": 0, "kapa2": 1}}"#);
    let o = sqzc(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "config");
    let o = sqzc(&["recipe", "fig9"]);
    assert_eq!(o.status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_sqzc"))
        .args(["run", "--config", &cfg])
        .env("SQZC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn missing_file_exits_4() {
    let o = sqzc(&["run", "--config", "/nonexistent/sqzc.json"]);
    assert_eq!(o.status.code(), Some(4));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "io");
    assert!(e["message"].as_str().unwrap().contains("/nonexistent/sqzc.json"));
}

#[test]
fn failed_points_exit_3_after_writing() {
    let dir = scratch("fail");
    let cfg = write(
        &dir,
        "c.json",
        r#"{"circuit": {"kappa1": 50, "eps1_mag": 2}, "sweep": [{"variable": "eps1_mag", "start": 2, "stop": 3, "points": 2}],
            "solver": {"optimize_detuning": {"window": [1, 2]}}, "output": {"name": "f"}}"#,
    );
    let o = sqzc(&["run", "--config", &cfg, "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"], "solver");
    let r = rows(&dir.join("f.csv"));
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row["g_status"] == "no_bracket"));
}

#[test]
fn recipe_config_round_trip() {
    let dir = scratch("recipe");
    let path = dir.join("fig5.json");
    let o = sqzc(&["recipe", "fig5", "--emit-config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let parsed = ScenarioConfig::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed, recipe(Recipe::Fig5, RecipeOptions::default()));
}

#[test]
fn steady_state_and_wigner_commands() {
    let dir = scratch("fock");
    let cfg = write(
        &dir,
        "c.json",
        r#"{"circuit": {"kappa1": 6, "eps1_mag": 1.2, "g": 2, "delta_q": 9, "delta12": 0.3},
            "truncation": {"n1": 3, "n2": 6, "include_qubit": true}, "solver": {"tier": "fock"}}"#,
    );
    let state = dir.join("rho.sqzc");
    let o = sqzc(&["fock", "steady", "--config", &cfg, "--state-out", state.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["dim"], 36);
    let var = summary["var_min"].as_f64().unwrap();
    assert!(var > 0.0 && var < 0.5);
    let out = dir.join("w.csv");
    let o = sqzc(&["fock", "wigner", "--state", state.to_str().unwrap(), "--xmax", "5", "--points", "21", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out);
    assert_eq!(r.len(), 21 * 21);
    assert_eq!(r[0]["x"].parse::<f64>().unwrap(), -5.0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((report["normalization"].as_f64().unwrap() - 1.0).abs() < 1e-2);
    let o = sqzc(&["fock", "wigner", "--state", cfg.as_str(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gaussian_optimum_command_and_mhz_units() {
    let dir = scratch("opt");
    let norm = write(&dir, "n.json", r#"{"circuit": {"kappa1": 50, "eps1_mag": 0, "g": 56, "delta_q": 600}}"#);
    let mhz = write(&dir, "m.json", r#"{"circuit": {"kappa1": 100, "kappa2": 2, "eps1_mag": 0, "g": 112, "delta_q": 1200}, "kappa2_mhz": 2}"#);
    let a = sqzc(&["gaussian", "optimum", "--config", &norm, "--eps1", "6", "--window", "-3,10"]);
    let b = sqzc(&["gaussian", "optimum", "--config", &mhz, "--eps1", "12", "--window=-6,20"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let a: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    let va = a["var_min"].as_f64().unwrap();
    assert!(va < 0.5 && va > 0.1);
    assert!((va - b["var_min"].as_f64().unwrap()).abs() < 1e-9);
    assert!((a["delta12"].as_f64().unwrap() - b["delta12"].as_f64().unwrap()).abs() < 1e-6);
}

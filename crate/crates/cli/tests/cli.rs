use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn carnot_lab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carnot-lab"))
        .args(args)
        .env("CARNOT_LAB_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn result(path: &Path) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["result"].clone()
}

#[test]
fn bound_prints_exact_fractions() {
    let dir = tempfile::tempdir().unwrap();
    let o = carnot_lab(dir.path(), &["bound", "--n", "3", "--Q", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("alpha <= 2/3") && s.contains("delta >= -4/9"), "{s}");
    assert_eq!(result(&dir.path().join("bound.json"))["alpha_bound"], "2/3");
}

#[test]
fn coarea_on_empty_region_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let o = carnot_lab(dir.path(), &["coarea", "--group", "heis1", "--map", "coord:x", "--p", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = result(&dir.path().join("coarea.json"));
    assert_eq!(r["reports"][0]["lhs"], 0.0);
    assert_eq!(r["reports"][0]["rhs"], 0.0);
    let csv = std::fs::read_to_string(dir.path().join("coarea.csv")).unwrap();
    assert!(csv.starts_with("# tool: carnot-lab "));
    assert!(csv.contains("# config_hash: ") && csv.contains("# seed: 0"));
}

#[test]
fn vertical_segment_has_dimension_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = carnot_lab(dir.path(), &["dimension", "--group", "heis1", "--region", "vertical-segment:h=1", "--sweep", "2..7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let d = result(&dir.path().join("dimension.json"))["dimension"].as_f64().unwrap();
    assert!((d - 2.0).abs() <= 0.15, "{d}");
    let csv = std::fs::read_to_string(dir.path().join("dimension.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "epsilon,value,p,N,ell,region,gauge"));
}

#[test]
fn unknown_suite_exits_one_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = carnot_lab(dir.path(), &["suite", "everything"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage: carnot-lab suite"), "{}", stderr(&o));
}

#[test]
fn failed_check_exits_two() {
    // Radius alone is not admissible for unit-length segments.
    let dir = tempfile::tempdir().unwrap();
    let o = carnot_lab(dir.path(), &["modulus", "--gauge", "radius", "--n", "1182"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert_eq!(result(&dir.path().join("modulus.json"))["admissible"], false);
}

#[test]
fn errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(carnot_lab(dir.path(), &["dimension", "--region", "blob:r=1"]).status.code(), Some(1));
    assert_eq!(carnot_lab(dir.path(), &["dimension", "--no-such-flag"]).status.code(), Some(1));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "operation = \"bound\"\n[params]\ntopological_dim = 3\nhomogeneous_dim = 4\ncolor = 2\n").unwrap();
    let o = carnot_lab(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 5, column 1"), "{}", stderr(&o));
}

#[test]
fn saved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = dir.path().join("premeasure.toml");
    let args = ["premeasure", "--region", "horizontal-segment:L=1", "--p", "2", "--n", "1", "--sweep", "2..5"];
    let mut with_save: Vec<&str> = args.to_vec();
    with_save.extend(["--save-config", cfg.to_str().unwrap()]);
    assert_eq!(carnot_lab(&a, &with_save).status.code(), Some(0));
    assert_eq!(carnot_lab(&b, &["run", cfg.to_str().unwrap()]).status.code(), Some(0));
    for f in ["premeasure.json", "premeasure.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn out_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (env_dir, flag_dir) = (dir.path().join("env"), dir.path().join("flag"));
    let o = carnot_lab(&env_dir, &["doubling", "--out", flag_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.join("doubling.json").exists());
    assert!(!env_dir.exists());
    assert_eq!(result(&flag_dir.join("doubling.json"))["report"]["multiplicity"], 7);
}

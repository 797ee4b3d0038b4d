use std::path::Path;
use std::process::{Command, Output};

use refined_curves::toric::{ModelFile, ToricSurfaceModel};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_refined-curves"));
    c.env_remove("REFINED_CURVES_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_str(&stdout(o)).unwrap()
}

fn entries(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir).map(|r| r.map(|e| e.unwrap().path()).collect()).unwrap_or_default();
    v.sort();
    v
}

#[test]
fn d_series_at_n_zero_is_one() {
    let v = json(&run(&["d-series", "p2:1", "--n-max", "0", "--no-cache"]));
    let c = &v["series"]["coeffs"];
    assert_eq!(c.as_array().unwrap().len(), 1);
    assert_eq!(c[0]["coeffs"][0]["coeffs"], serde_json::json!(["1"]));
    assert_eq!(c[0]["coeffs"][0]["low"], 0);
}

#[test]
fn refined_delta_one_on_conics() {
    let o = run(&["refined", "p2:2", "--delta", "1", "--n-max", "4", "--no-cache"]);
    let v = json(&o);
    assert_eq!(v["entries"][1]["N_at_y1"], "3");
    assert_eq!(v["entries"].as_array().unwrap().len(), 5);
    assert_eq!(v["m"], 4);
    let table = stdout(&run(&["refined", "p2:2", "--delta", "1", "--n-max", "4", "--format", "table", "--no-cache"]));
    let row = table.lines().find(|l| l.split_whitespace().nth(3) == Some("1")).unwrap();
    assert!(row.trim_end().ends_with(" 3"), "{row}");
}

#[test]
fn m_and_delta_select_the_same_table() {
    let a = run(&["refined", "p2:2", "--delta", "1", "--no-cache"]);
    let b = run(&["refined", "p2:2", "--m", "4", "--no-cache"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let both = run(&["refined", "p2:2", "--delta", "1", "--m", "4"]);
    assert!(!both.status.success());
    let neither = run(&["refined", "p2:2"]);
    assert!(!neither.status.success());
}

#[test]
fn short_truncation_reports_minimum() {
    let o = run(&["refined", "p2:3", "--delta", "2", "--n-max", "2", "--no-cache"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("--n-max >= 3") && e.contains("--x-order >= 2"), "{e}");
}

#[test]
fn bad_inputs_exit_with_two() {
    for args in [
        &["refined", "cubic:3", "--delta", "1"][..],
        &["d-series", "p2:x", "--n-max", "1"],
        &["refined", "p2:2", "--delta", "9"],
        &["check", "--suite", "nope"],
        &["d-series", "p2", "--bundle", "1,0", "--n-max", "1"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn csv_columns() {
    let o = run(&["refined", "p1xp1:2,2", "--delta", "1", "--format", "csv", "--no-cache"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("surface,bundle,delta,i,N_i,M_i,N_i_at_y1"));
    let second = lines.nth(1).unwrap();
    assert!(second.starts_with("p1xp1:2,2,") || second.starts_with("\"p1xp1:2,2\","), "{second}");
    assert!(second.ends_with(",12"), "{second}");
}

#[test]
fn bundle_override_and_model_file() {
    let a = run(&["refined", "p2", "--bundle", "2,0,0", "--delta", "1", "--no-cache"]);
    let b = run(&["refined", "p2:2", "--delta", "1", "--no-cache"]);
    assert_eq!(json(&a)["entries"], json(&b)["entries"]);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quadric.json");
    let (s, l) = ToricSurfaceModel::p1xp1(1, 1);
    std::fs::write(&path, serde_json::to_string(&ModelFile::from_model(&s, &l)).unwrap()).unwrap();
    let from_file = json(&run(&["refined", path.to_str().unwrap(), "--delta", "2", "--no-cache"]));
    let preset = json(&run(&["refined", "p1xp1:1,1", "--delta", "2", "--no-cache"]));
    assert_eq!(from_file["entries"], preset["entries"]);
    assert_eq!(from_file["bundle"], "model");
}

#[test]
fn node_polynomials() {
    let v = json(&run(&["node-poly", "p2:3", "--delta", "2", "--no-cache"]));
    let polys = v["node_polynomials"].as_array().unwrap();
    let at_one: Vec<&str> = polys.iter().map(|p| p["N_at_y1"].as_str().unwrap()).collect();
    // one curve, 12 nodal cubics in a pencil, 21 reducible conic+line in a net
    assert_eq!(at_one, ["1", "12", "21"]);
    assert!(polys.iter().all(|p| p["palindromic"] == true));
}

#[test]
fn outputs_do_not_depend_on_threads_or_cache() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["refined", "p1xp1:1,1", "--delta", "2"];
    let plain = run(&[&base[..], &["--no-cache", "--threads", "1"]].concat());
    let threaded = run(&[&base[..], &["--no-cache", "--threads", "3"]].concat());
    let cold = run(&[&base[..], &["--cache-dir", d]].concat());
    assert_eq!(entries(dir.path()).len(), 4);
    let warm = run(&[&base[..], &["--cache-dir", d]].concat());
    assert!(plain.status.success());
    for o in [&threaded, &cold, &warm] {
        assert_eq!(plain.stdout, o.stdout);
    }
    let seeded = run(&[&base[..], &["--no-cache", "--seed", "99", "--paranoid"]].concat());
    assert_eq!(plain.stdout, seeded.stdout);
}

#[test]
fn env_var_overrides_cache_dir_and_tampering_recovers() {
    let flag_dir = tempfile::tempdir().unwrap();
    let env_dir = tempfile::tempdir().unwrap();
    let args = ["d-series", "p2:2", "--n-max", "2", "--x-order", "1", "--cache-dir", flag_dir.path().to_str().unwrap()];
    let first = bin().args(args).env("REFINED_CURVES_CACHE", env_dir.path()).output().unwrap();
    assert!(first.status.success());
    assert!(entries(flag_dir.path()).is_empty());
    let files = entries(env_dir.path());
    assert_eq!(files.len(), 3);

    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        std::fs::write(f, text.replace("\"value_sha256\": \"", "\"value_sha256\": \"0")).unwrap();
    }
    let again = bin().args(args).env("REFINED_CURVES_CACHE", env_dir.path()).output().unwrap();
    assert!(again.status.success());
    assert_eq!(first.stdout, again.stdout);
    assert!(stderr(&again).contains("corrupt"), "{}", stderr(&again));

    let none = bin().args(args).arg("--no-cache").env("REFINED_CURVES_CACHE", env_dir.path()).output().unwrap();
    assert_eq!(first.stdout, none.stdout);
}

#[test]
fn universal_fit_small() {
    let v = json(&run(&["universal-fit", "--n-max", "2", "--x-order", "1", "--eval", "0,0,0,0", "--no-cache"]));
    assert_eq!(v["residual_ok"], true);
    assert_eq!(v["held_out"]["name"], "p1xp1:1,2");
    assert_eq!(v["evaluation"]["series"]["coeffs"][0]["coeffs"][0]["coeffs"], serde_json::json!(["1"]));
    let singular = run(&["universal-fit", "--basis", "p2:1", "p2:2", "p1xp1:1,1", "hirzebruch:1:1,2", "--n-max", "1"]);
    assert_eq!(singular.status.code(), Some(1));
    assert!(stderr(&singular).contains("rank"), "{}", stderr(&singular));
}

#[test]
fn core_suite_passes() {
    let o = run(&["check", "--suite", "core", "--format", "table", "--no-cache"]);
    let text = stdout(&o);
    assert!(o.status.success(), "{text}{}", stderr(&o));
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

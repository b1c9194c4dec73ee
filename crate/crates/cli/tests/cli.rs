use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use solenoid_core::approxcore::{BoundedValue, Ledger};
use solenoid_core::polyfield::{check_solenoidal, PolyPair};
use solenoid_core::spectral::PairField;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_solenoid"));
    c.env_remove("SOLENOID_CONSTANTS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn solenoid")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).expect("write input");
    p
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

const MODE11: &str = r#"{"schema":"solenoid/1","modes":[{"n":1,"m":1,"u1":"-0.5","u2":"1/2"}]}"#;
const SMALL: &str = r#"{"schema":"solenoid/1","cutoff":4,"modes":[
  {"n":1,"m":2,"u1":"-0.02","u2":"0.01"},{"n":2,"m":1,"u1":"0.005","u2":"-0.01"}]}"#;

#[test]
fn basis_example_gives_ten_checked_pairs() {
    let v = json_of(&run(&["basis", "--degree", "4", "--count", "10"]));
    assert_eq!(v["schema"], "solenoid/1");
    let elems = v["elements"].as_array().unwrap();
    assert_eq!(elems.len(), 10);
    for e in elems {
        assert!(e["checks"].as_object().unwrap().values().all(|c| c == true));
        let p: PolyPair = serde_json::from_value(e["pair"].clone()).unwrap();
        assert!(p.degree() <= 4 && !p.is_zero());
        assert!(check_solenoidal(&p));
    }
}

#[test]
fn semigroup_example_contains_heat_factor() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "mode11.json", MODE11);
    let v = json_of(&run(&["semigroup", "--t", "0.1", "--precision", "12", "--input", s(&input)]));
    let f: PairField = serde_json::from_value(v["field"].clone()).unwrap();
    let heat = (-0.2 * PI * PI).exp();
    let (a, b) = f.coeffs(1, 1);
    for (c, x) in [(a, -0.5), (b, 0.5)] {
        let want = x * heat;
        assert!(c.inflate(1e-15).contains(want), "{c:?} vs {want}");
    }
    assert_eq!(v["certificate"]["closes"], true);
}

#[test]
fn horizon_example_certifies_contraction() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", SMALL);
    let v = json_of(&run(&["horizon", "--input", s(&input)]));
    let eps: BoundedValue = serde_json::from_value(v["certificate"]["epsilon"].clone()).unwrap();
    assert!(eps.hi() < 1.0);
    assert_eq!(v["epsilon_below_one"], true);
}

#[test]
fn exit_codes_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", SMALL);
    let bad = write(dir.path(), "bad.json", r#"{"schema":"solenoid/0","modes":[]}"#);
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["horizon", "--input", s(&bad)], 2, "parse"),
        (vec!["solve", "--input", s(&input), "--t", "0.x", "--precision", "8"], 2, "parse"),
        (vec!["solve", "--input", s(&input), "--t", "-1", "--precision", "8"], 3, "precondition"),
        (vec!["solve", "--input", s(&input), "--t", "1", "--precision", "8", "--mode-cap", "4"], 4, "horizon-violation"),
        (vec!["solve", "--input", s(&input), "--t", "1/262144", "--precision", "20", "--mode-cap", "1"], 5, "budget-not-met"),
    ];
    for (args, code, kind) in cases {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with(&format!("solenoid:error:{kind}:")), "{err}");
        assert!(out.stdout.is_empty());
    }
    // argument errors from the parser itself
    assert_eq!(run(&["solve", "--t", "1"]).status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "mode11.json", MODE11);
    let mut files = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("out{i}.json"));
        let st = run(&["semigroup", "--t", "1/8", "--precision", "16", "--input", s(&input), "--output", s(&out)]);
        assert!(st.status.success());
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn constants_override_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", SMALL);
    let env_table = write(dir.path(), "env.json", r#"{"T_cap":"1/1048576"}"#);
    let flag_table = write(dir.path(), "flag.json", r#"{"T_cap":"1/2097152"}"#);
    let out = bin().args(["horizon", "--input", s(&input)]).env("SOLENOID_CONSTANTS", &env_table).output().unwrap();
    assert_eq!(json_of(&out)["certificate"]["t_a"], "1/1048576");
    let out = bin().args(["horizon", "--input", s(&input), "--constants", s(&flag_table)]).env("SOLENOID_CONSTANTS", &env_table).output().unwrap();
    assert_eq!(json_of(&out)["certificate"]["t_a"], "1/2097152");
    let broken = write(dir.path(), "broken.json", r#"{"bogus":1}"#);
    let out = bin().args(["horizon", "--input", s(&input)]).env("SOLENOID_CONSTANTS", &broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_ledger_closes_and_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", SMALL);
    let csv = dir.path().join("u.csv");
    let v = json_of(&run(&["solve", "--input", s(&input), "--t", "1/262144", "--precision", "8", "--mode-cap", "6", "--emit-csv", s(&csv)]));
    let ledger: Ledger = serde_json::from_value(serde_json::json!({ "lines": v["certificate"]["lines"] })).unwrap();
    assert!(!ledger.lines.is_empty());
    assert!(ledger.closes(-8));
    assert_eq!(v["certificate"]["closes"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,m,u1_center"));
    assert!(text.lines().count() > 1);
}

#[test]
fn pressure_paths_agree_through_the_driver() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.json", SMALL);
    let mut vals = Vec::new();
    for path in ["x-then-y", "y-then-x"] {
        let v = json_of(&run(&[
            "pressure", "--input", s(&input), "--t", "1/262144", "--x", "0.3", "--y", "0.7", "--precision", "8", "--mode-cap", "6", "--path", path,
        ]));
        let b: BoundedValue = serde_json::from_value(v["value"].clone()).unwrap();
        assert!(b.width() <= 2f64.powi(-8));
        vals.push(b);
    }
    assert!(vals[0].overlaps(&vals[1]));
    let out = run(&["pressure", "--input", s(&input), "--t", "1/262144", "--x", "1.5", "--y", "0.5", "--precision", "8"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exact_inputs_survive_projection() {
    // solenoidal inputs with p/q and decimal coefficients come back enclosed
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dir = tempfile::tempdir().unwrap();
    for case in 0..4 {
        let mut modes = Vec::new();
        let mut want = Vec::new();
        for n in 1..=3i64 {
            for m in 1..=3i64 {
                let p: i64 = rng.gen_range(-999..=999);
                let q: i64 = rng.gen_range(1..=97);
                // (−m, n)·(p/q); u₂ written as a decimal when q = 1
                let u1 = format!("{}/{}", -m * p, q);
                let u2 = if q == 1 { format!("{}.0", n * p) } else { format!("{}/{}", n * p, q) };
                modes.push(format!(r#"{{"n":{n},"m":{m},"u1":"{u1}","u2":"{u2}"}}"#));
                want.push((n, m, (-m * p) as f64 / q as f64, (n * p) as f64 / q as f64));
            }
        }
        let text = format!(r#"{{"schema":"solenoid/1","modes":[{}]}}"#, modes.join(","));
        let input = write(dir.path(), &format!("in{case}.json"), &text);
        let v = json_of(&run(&["project", "--input", s(&input), "--precision", "20"]));
        assert_eq!(v["divergence_encloses_zero"], true);
        let f: PairField = serde_json::from_value(v["field"].clone()).unwrap();
        for (n, m, a, b) in want {
            let (x, y) = f.coeffs(n, m);
            assert!(x.inflate(1e-9 * a.abs()).contains(a) && y.inflate(1e-9 * b.abs()).contains(b), "({n},{m})");
        }
    }
}

use std::process::Command;

use deltader_core::cli::run;
use deltader_core::text::{format_element, parse_element};
use serde_json::Value;

fn run_capture(args: &[&str]) -> (i32, String) {
    let mut buf = Vec::new();
    let mut full = vec!["deltader"];
    full.extend_from_slice(args);
    let code = run(full, &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut a = args.to_vec();
    a.extend(["--json", "-"]);
    let (code, out) = run_capture(&a);
    (code, serde_json::from_str(&out).expect("stdout is pure json"))
}

#[test]
fn solve_wab_has_interior_dimension_one() {
    let (code, v) = json_of(&["solve", "--algebra", "wab", "--a", "0", "--b", "0", "--in", "-3..3", "--out", "-6..6"]);
    assert_eq!(code, 0);
    assert_eq!(v["schemaVersion"], "1");
    assert_eq!(v["command"], "solve");
    assert_eq!(v["results"]["dimInterior"], 1);
    assert_eq!(v["results"]["dimSolved"], 1);
    assert_eq!(v["results"]["expectedContained"], true);
    assert_eq!(v["results"]["basis"].as_array().unwrap().len(), 1);
    assert!(v.get("timingMs").is_none());
}

#[test]
fn sweep_tsv_jumps_at_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.tsv");
    let (code, _) = run_capture(&["solve", "--algebra", "wab", "--a", "0", "--b", "-3..3", "--tsv", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let tsv = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines[0], "algebra\ta\tb\t|I|\t|O|\tdimSolved\tdimInterior");
    let dims: Vec<(&str, &str)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[2], f[6])
        })
        .collect();
    assert_eq!(
        dims,
        [("-3", "1"), ("-2", "1"), ("-1", "14"), ("0", "1"), ("1", "1"), ("2", "1"), ("3", "1")]
    );
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve", "--algebra", "thin", "--in", "1..6", "--out", "1..10"],
        vec!["two-local", "--algebra", "thin", "--map", "thin-nabla"],
        vec!["verify-all", "--quick"],
    ] {
        let mut outputs = Vec::new();
        for n in 0..2 {
            let path = dir.path().join(format!("r{n}.json"));
            let mut a = args.clone();
            a.extend(["--json", path.to_str().unwrap()]);
            run_capture(&a);
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}

#[test]
fn counterexamples_report_thin_witnesses() {
    let (code, v) = json_of(&["counterexamples", "--algebra", "thin"]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert_eq!(r["violationWitness"]["pair"], serde_json::json!(["e1", "e3"]));
    assert_eq!(r["violationWitness"]["residual"], "1/2*e4");
    assert_eq!(r["nonAdditivity"]["nonadditive"], true);
    assert_eq!(r["nonAdditivity"]["lhs"], "0");
    assert_eq!(r["localFeasible"], true);
    assert_eq!(r["twoLocalFeasible"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(run_capture(&["local", "--algebra", "solv", "--map", "table:e2=e3", "--x", "e2"]).0, 1);
    assert_eq!(run_capture(&["local", "--algebra", "solv", "--map", "solv-deltabar"]).0, 0);
    assert_eq!(run_capture(&["check-map", "--algebra", "solv", "--map", "solv-deltabar"]).0, 1);
    assert_eq!(run_capture(&["check-map", "--algebra", "wittz", "--map", "shift:t=-2,w=3"]).0, 0);
    assert_eq!(run_capture(&["solve", "--algebra", "nope"]).0, 2);
    assert_eq!(run_capture(&["solve", "--algebra", "thin", "--in", "1..x"]).0, 2);
    assert_eq!(run_capture(&["local", "--algebra", "thin", "--map", "shift:t=1"]).0, 2);
    assert_eq!(run_capture(&["local", "--algebra", "thin", "--map", "id", "--x", "e0"]).0, 2);
    assert_eq!(run_capture(&["frobnicate"]).0, 2);
}

#[test]
fn verify_all_quick_reports_every_criterion() {
    let (code, out) = run_capture(&["verify-all", "--quick"]);
    for id in 1..=10 {
        assert!(out.contains(&format!("criterion {id:>2} ")), "missing criterion {id}");
    }
    // Criterion 6 pins a value its own definitions contradict; see README.
    assert_eq!(out.matches(" FAIL ").count(), 1);
    assert!(out.contains("criterion  6 FAIL"));
    assert_eq!(code, 1);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# thin run\nalgebra = thin\nin = 1..6\nout = 1..10\n").unwrap();
    let (code, v) = json_of(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["dimSolved"], 15);
    let (_, v) = json_of(&["solve", "--config", cfg.to_str().unwrap(), "--out", "1..6"]);
    assert_eq!(v["results"]["dimSolved"], 7);
    assert_eq!(v["inputs"]["out"], "1..6");

    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run_capture(&["solve", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn timing_is_opt_in() {
    let (_, v) = json_of(&["solve", "--algebra", "solv", "--timing"]);
    assert!(v["timingMs"].is_u64());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_deltader");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["solve", "--algebra", "wittz"]), Some(0));
    assert_eq!(status(&["solve"]), Some(2));
    assert_eq!(status(&["--help"]), Some(0));
}

#[test]
fn cli_element_literals_round_trip() {
    for s in ["e1+e2", "3/4*e-1 - f2", "e1 + e2", "-e1 + e2 + e3", "2*e1 - e3 + e6", "5*e4"] {
        let v = parse_element(s).unwrap();
        assert_eq!(parse_element(&format_element(&v)).unwrap(), v);
    }
    assert!(parse_element("e0+").is_err());
}

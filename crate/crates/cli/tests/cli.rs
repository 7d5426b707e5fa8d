use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const K3: &str = r#"{
  "version": 1,
  "objective": "cardinality",
  "vertices": [
    { "name": "a", "b": [0, 1, 2] },
    { "name": "b", "b": [0, 1, 2] },
    { "name": "c", "b": [0, 1, 2] }
  ],
  "edges": [
    { "u": "a", "v": "b", "weight": 1 },
    { "u": "b", "v": "c", "weight": 1 },
    { "u": "a", "v": "c", "weight": 1 }
  ]
}"#;

const P3_ONES: &str = r#"{
  "version": 1,
  "vertices": [
    { "name": "a", "b": [1] },
    { "name": "b", "b": [1] },
    { "name": "c", "b": [1] }
  ],
  "edges": [
    { "u": "a", "v": "b", "weight": 1 },
    { "u": "b", "v": "c", "weight": 1 }
  ]
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jumpfactor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn solve_k3_cardinality() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "k3.json", K3);
    let out = dir.path().join("r.json");
    let o = run(&["solve", s(&inst), "--out", s(&out)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains("optimal cardinality value: 3"));
    let r = json(&out);
    assert_eq!(r["value"], 3);
    assert_eq!(r["edges"], serde_json::json!([0, 1, 2]));
    assert_eq!(r["degrees"], serde_json::json!([2, 2, 2]));
    assert!(r["iterations"].as_u64().unwrap() >= 1);
    assert!(r["oracle_calls"].as_u64().unwrap() >= 1);
}

#[test]
fn solve_infeasible_exits_2() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "p3.json", P3_ONES);
    let o = run(&["solve", s(&inst)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("infeasible"));
    let o = run(&["solve", s(&inst), "--brute"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn report_field_order_is_stable() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "k3.json", K3);
    let out = dir.path().join("r.json");
    run(&["solve", s(&inst), "--out", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let keys = [
        "status",
        "objective",
        "method",
        "value",
        "edges",
        "degrees",
        "iterations",
        "oracle_calls",
    ];
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn solve_matches_brute_on_generated_instances() {
    let dir = TempDir::new().unwrap();
    for seed in 0..10 {
        let inst = dir.path().join(format!("g{seed}.json"));
        let seed = seed.to_string();
        assert_eq!(
            run(&["gen", "--seed", &seed, "--out", s(&inst)])
                .status
                .code(),
            Some(0)
        );
        for objective in ["cardinality", "weighted"] {
            let a = dir.path().join("a.json");
            let b = dir.path().join("b.json");
            let ca = run(&["solve", s(&inst), "--objective", objective, "--out", s(&a)])
                .status
                .code();
            let cb = run(&[
                "solve",
                s(&inst),
                "--objective",
                objective,
                "--brute",
                "--out",
                s(&b),
            ])
            .status
            .code();
            assert_eq!(ca, cb);
            assert_eq!(json(&a)["value"], json(&b)["value"]);
        }
    }
}

#[test]
fn initial_factor_handling() {
    let dir = TempDir::new().unwrap();
    let even = K3.replace("[0, 1, 2]", "[0, 2]");
    let inst = write(&dir, "k3even.json", &even);
    let bad = write(&dir, "bad.json", "[0]");
    let good = write(&dir, "good.json", "[]");
    let o = run(&["solve", s(&inst), "--initial", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("violates B"));
    assert_eq!(
        run(&["solve", s(&inst), "--initial", s(&bad), "--fallback"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["solve", s(&inst), "--initial", s(&good)])
            .status
            .code(),
        Some(0)
    );
    let out_of_range = write(&dir, "oor.json", "[7]");
    assert_eq!(
        run(&["solve", s(&inst), "--initial", s(&out_of_range)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn parse_errors_report_location() {
    let dir = TempDir::new().unwrap();
    let broken = write(
        &dir,
        "broken.json",
        "{\n  \"version\": 1,\n  \"vertices\": [,\n}",
    );
    let o = run(&["solve", s(&broken)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let gap = write(&dir, "gap.json", &K3.replacen("[0, 1, 2]", "[0, 3]", 1));
    let o = run(&["solve", s(&gap)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("vertices[0].b"));

    let o = run(&["solve", "/nonexistent/instance.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn oracle_matching_and_brute_agree() {
    let dir = TempDir::new().unwrap();
    let path = r#"{
  "version": 1,
  "vertices": [
    { "name": "a", "b": [0, 1] },
    { "name": "b", "b": [0, 1, 2] },
    { "name": "c", "b": [0, 1] }
  ],
  "edges": [
    { "u": "a", "v": "b", "weight": 2 },
    { "u": "b", "v": "c", "weight": 5 }
  ]
}"#;
    let inst = write(&dir, "path.json", path);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(
        run(&[
            "oracle",
            s(&inst),
            "--product",
            "1:1,2:2,1:1",
            "--out",
            s(&a)
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(
        run(&[
            "oracle",
            s(&inst),
            "--product",
            "1:1,2:2,1:1",
            "--brute",
            "--out",
            s(&b)
        ])
        .status
        .code(),
        Some(0)
    );
    assert_eq!(json(&a)["value"], 7);
    assert_eq!(json(&a)["method"], "matching");
    assert_eq!(json(&a)["value"], json(&b)["value"]);
    assert_eq!(
        run(&["oracle", s(&inst), "--product", "1:1,0:0,1:1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["oracle", s(&inst), "--product", "-1:1,0:2,1:1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["oracle", s(&inst), "--product", "0:1,0:0,0:0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["oracle", s(&inst), "--product", "0:0,0:0"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn verify_zero_trials_passes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let o = run(&["verify", "--trials", "0", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["suites"].as_array().unwrap().len(), 7);
}

#[test]
fn verify_selected_suites() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("v.json");
    let o = run(&[
        "verify",
        "--suite",
        "parity",
        "--suite",
        "lemma2",
        "--trials",
        "50",
        "--seed",
        "9",
        "--out",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let r = json(&out);
    assert_eq!(r["seed"], 9);
    assert_eq!(r["suites"][0]["suite"], "parity");
    assert_eq!(r["suites"][1]["trials"], 50);
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(1));
}

#[test]
fn gen_is_deterministic_and_valid() {
    let a = run(&["gen", "--seed", "42"]);
    let b = run(&["gen", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["gen", "--seed", "43"]).stdout);

    let trivial = run(&["gen", "--vertices", "1", "--edges", "0"]);
    let doc: Value = serde_json::from_slice(&trivial.stdout).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 1);
    assert!(doc["edges"].as_array().unwrap().is_empty());

    assert_eq!(run(&["gen", "--vertices", "0"]).status.code(), Some(1));
    assert_eq!(
        run(&["gen", "--weight-lo", "3", "--weight-hi", "-3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn gen_round_trips_through_solve() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("i.json");
    let o = run(&[
        "gen",
        "--seed",
        "5",
        "--vertices",
        "4",
        "--edges",
        "6",
        "--objective",
        "weighted",
        "--out",
        s(&inst),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let code = run(&["solve", s(&inst)]).status.code();
    assert!(matches!(code, Some(0) | Some(2)));
}

#[test]
fn bench_runs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("b.json");
    let o = run(&[
        "bench",
        "--trials",
        "5",
        "--vertices",
        "4",
        "--edges",
        "6",
        "--out",
        s(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = json(&out);
    assert_eq!(r["trials"], 5);
    assert_eq!(
        r["optimal"].as_u64().unwrap() + r["infeasible"].as_u64().unwrap(),
        5
    );
}

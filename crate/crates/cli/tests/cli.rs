use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const TRI: &str = r#"{
  "dimension": 2,
  "vertices": [
    {"id": 0, "set": {"kind": "point", "p": [0.0, 0.0]}},
    {"id": 1, "set": {"kind": "segment", "a": [1.0, -1.0], "b": [1.0, 1.0]}},
    {"id": 2, "set": {"kind": "point", "p": [2.0, 0.0]}}
  ],
  "edges": [[0, 1], [1, 2]],
  "origin": 0,
  "destination": 2
}
"#;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_astar-gcs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_tri_has_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tri.json");
    fs::write(&inst, TRI).unwrap();
    let report = dir.path().join("r.json");
    let trace = dir.path().join("t.csv");
    let out = cli(&[
        "solve",
        s(&inst),
        "--algo",
        "astar-gcs",
        "--sinit",
        "astar",
        "--weight",
        "1.0",
        "--report",
        s(&report),
        "--trace",
        s(&trace),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    // The straight line through the segment has length 2.
    assert!((r["c_lb"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!(r["gap_pct"].as_f64().unwrap().abs() < 1e-4);
    assert_eq!(r["seed"], 0);
    assert!(r["version"].is_string() && r["accuracy"].is_number());
    let csv = fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("iter,phase,S_size"));

    let base = cli(&["solve", s(&inst), "--algo", "baseline"]);
    assert!(base.status.success());
    let r: Value = serde_json::from_slice(&base.stdout).unwrap();
    assert!(r["gap_pct"].as_f64().unwrap().abs() < 1e-4);
}

#[test]
fn max_iters_preempts() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("m.json");
    assert!(cli(&[
        "generate",
        "maze",
        "--rows",
        "3",
        "--cols",
        "3",
        "--seed",
        "2",
        "-o",
        s(&inst)
    ])
    .status
    .success());
    let out = cli(&[
        "solve",
        s(&inst),
        "--sinit",
        "source",
        "--weight",
        "0",
        "--max-iters",
        "1",
    ]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["termination"], "preempted");
    assert_eq!(r["iterations"], 1);
    assert_eq!(
        cli(&["solve", s(&inst), "--max-iters", "0"]).status.code(),
        Some(1)
    );
}

#[test]
fn bench_row_count() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..3 {
        let p = dir.path().join(format!("maze{seed}.json"));
        let out = cli(&[
            "generate",
            "maze",
            "--rows",
            "3",
            "--cols",
            "3",
            "--seed",
            &seed.to_string(),
            "-o",
            s(&p),
        ]);
        assert!(out.status.success());
    }
    let csv = dir.path().join("bench.csv");
    let summary = dir.path().join("summary.csv");
    let out = cli(&[
        "bench",
        s(dir.path()),
        "--weights",
        "0,1",
        "--seed",
        "7",
        "-o",
        s(&csv),
        "--summary",
        s(&summary),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("map,algo,variant,weight,origin,S_size,iters,lb,ub,gap_pct,millis")
    );
    assert_eq!(lines.count(), 3 * 2 * 2);
    assert!(fs::read_to_string(&summary)
        .unwrap()
        .starts_with("map,algo,variant,weight,runs"));
}

#[test]
fn plot_has_one_polyline() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("m.json");
    let report = dir.path().join("r.json");
    let svg = dir.path().join("m.svg");
    assert!(cli(&[
        "generate",
        "maze",
        "--rows",
        "4",
        "--cols",
        "4",
        "-o",
        s(&inst)
    ])
    .status
    .success());
    assert!(
        cli(&["solve", s(&inst), "--weight", "0", "--report", s(&report)])
            .status
            .success()
    );
    let out = cli(&["plot", s(&inst), "--report", s(&report), "-o", s(&svg)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<polyline").count(), 1);
    // Every opened element is closed on the same line.
    for line in text
        .lines()
        .filter(|l| l.starts_with('<') && !l.starts_with("</") && !l.starts_with("<svg"))
    {
        assert!(line.ends_with("/>") || line.starts_with("<g"), "{line}");
    }
}

#[test]
fn oracle_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tri.json");
    fs::write(&inst, TRI).unwrap();
    let out = cli(&["oracle", s(&inst)]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((r["c_opt"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(r["path"], serde_json::json!([0, 1, 2]));
}

#[test]
fn heuristic_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("m.json");
    let h2 = dir.path().join("h2.json");
    assert!(cli(&[
        "generate",
        "maze",
        "--rows",
        "3",
        "--cols",
        "3",
        "-o",
        s(&inst)
    ])
    .status
    .success());
    assert!(cli(&[
        "heuristic",
        s(&inst),
        "--method",
        "h2",
        "--nmax",
        "3",
        "-o",
        s(&h2)
    ])
    .status
    .success());
    let blended = cli(&[
        "heuristic",
        s(&inst),
        "--method",
        "blend",
        "--weight",
        "0.5",
        "--h2",
        s(&h2),
    ]);
    assert!(blended.status.success());
    let t: Value = serde_json::from_slice(&blended.stdout).unwrap();
    assert_eq!(t["method"], "blend");
    let solved = cli(&["solve", s(&inst), "--heuristic", s(&h2), "--weight", "1"]);
    assert!(solved.status.success());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let no_path = dir.path().join("cut.json");
    fs::write(
        &no_path,
        TRI.replace("[[0, 1], [1, 2]]", "[[0, 1], [2, 1]]"),
    )
    .unwrap();
    assert_eq!(cli(&["solve", s(&no_path)]).status.code(), Some(2));
    assert_eq!(cli(&["oracle", s(&no_path)]).status.code(), Some(2));

    let missing = dir.path().join("missing.json");
    assert_eq!(cli(&["solve", s(&missing)]).status.code(), Some(1));
    assert_eq!(cli(&["solve", "--nonsense"]).status.code(), Some(1));
    let tri = dir.path().join("tri.json");
    fs::write(&tri, TRI).unwrap();
    assert_eq!(
        cli(&["solve", s(&tri), "--weight", "1.5"]).status.code(),
        Some(1)
    );
    assert_eq!(
        cli(&["solve", s(&tri), "--origin", "9"]).status.code(),
        Some(1)
    );
    let out = cli(&["solve", s(&tri), "--origin", "2"]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

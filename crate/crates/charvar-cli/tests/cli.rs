//! End-to-end tests of the `charvar` binary: report schema, determinism,
//! exit codes, and file round trips between subcommands.

use std::process::{Command, Output};

fn charvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charvar"))
        .args(args)
        .env_remove("CHARVAR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

#[test]
fn enumerate_report_schema_and_values() {
    let report = stdout_json(&charvar(&["enumerate", "--rank", "2", "--twist", "5"]));
    assert_eq!(report["subcommand"], "enumerate");
    assert_eq!(report["results"]["r"], 2);
    let counts = report["results"]["counts"].as_array().unwrap();
    let distinct = counts
        .iter()
        .find(|row| row["sigma"] == serde_json::json!([1, 1]))
        .unwrap();
    assert_eq!(distinct["enumerated"], 4);
    assert_eq!(distinct["formula"], 4);
    assert_eq!(distinct["status"], "match");
}

#[test]
fn enumerate_flags_conjectural_twists() {
    let report = stdout_json(&charvar(&["enumerate", "--rank", "2", "--twist", "4"]));
    for row in report["results"]["counts"].as_array().unwrap() {
        assert_eq!(row["status"], "conjectural");
    }
}

#[test]
fn homology_betti_and_cells() {
    let report = stdout_json(&charvar(&["homology", "--twist", "4"]));
    assert_eq!(report["results"]["betti"], serde_json::json!([1, 0, 4]));
    assert_eq!(report["results"]["euler"], 5);
    assert_eq!(report["results"]["torsion"], serde_json::json!([[], [], []]));
    assert_eq!(report["results"]["orbifold_vertices"], 4);
}

#[test]
fn pillowcase_canonical_representative() {
    let report = stdout_json(&charvar(&["pillowcase", "0.25", "0.75"]));
    assert_eq!(report["results"]["s"], 0.25);
    assert_eq!(report["results"]["t"], 0.75);
    assert_eq!(report["results"]["orbifold"], false);
    let report = stdout_json(&charvar(&["pillowcase", "0.5", "0.0"]));
    assert_eq!(report["results"]["orbifold"], true);
}

#[test]
fn reports_are_deterministic() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-det-{}", std::process::id()));
    let dir_a = dir.join("a");
    let dir_b = dir.join("b");
    let run = |d: &std::path::Path| {
        charvar(&[
            "sample",
            "--group",
            "SU(2)",
            "--stratum",
            "irreducible",
            "--twist",
            "5",
            "--count",
            "2",
            "--seed",
            "11",
            "--out-dir",
            d.to_str().unwrap(),
        ])
    };
    let out_a = run(&dir_a);
    let out_b = run(&dir_b);
    assert!(out_a.status.success() && out_b.status.success());
    // Identical seeds give identical sampled files.
    let file_a = std::fs::read_to_string(dir_a.join("rep_0000.json")).unwrap();
    let file_b = std::fs::read_to_string(dir_b.join("rep_0000.json")).unwrap();
    assert_eq!(file_a, file_b);
    // And byte-identical enumerate reports.
    let r1 = charvar(&["enumerate", "--rank", "3", "--twist", "7"]);
    let r2 = charvar(&["enumerate", "--rank", "3", "--twist", "7"]);
    assert_eq!(r1.stdout, r2.stdout);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn classify_sampled_irreducible() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-classify-{}", std::process::id()));
    let out = charvar(&[
        "sample",
        "--group",
        "SU(2)",
        "--stratum",
        "irreducible",
        "--twist",
        "4",
        "--count",
        "1",
        "--seed",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rep_path = dir.join("rep_0000.json");
    let report = stdout_json(&charvar(&["classify", "--input", rep_path.to_str().unwrap()]));
    assert_eq!(report["results"]["relation_ok"], true);
    assert_eq!(report["results"]["irreducible"], true);
    assert_eq!(report["results"]["partition"], serde_json::json!([2]));
    // xi = A^4 scalar, a square root of unity for SU(2).
    let xi = report["results"]["xi"].as_array().unwrap();
    let re = xi[0].as_f64().unwrap();
    let im = xi[1].as_f64().unwrap();
    assert!((re.abs() - 1.0).abs() <= 1e-8 && im.abs() <= 1e-8);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn retract_trace_round_trip() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-retract-{}", std::process::id()));
    let out = charvar(&[
        "sample",
        "--group",
        "SL(2,C)",
        "--stratum",
        "irreducible",
        "--twist",
        "3",
        "--count",
        "1",
        "--seed",
        "5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rep_path = dir.join("rep_0000.json");
    let trace_path = dir.join("trace.jsonl");
    let report = stdout_json(&charvar(&[
        "retract",
        "--input",
        rep_path.to_str().unwrap(),
        "--steps",
        "4",
        "--trace",
        trace_path.to_str().unwrap(),
    ]));
    assert_eq!(report["results"]["final_group"], "SU(2)");
    assert_eq!(report["results"]["endpoint"]["class"], "irreducible");
    assert!(report["results"]["max_constraint_residual"].as_f64().unwrap() <= 1e-10);
    // Three stages, five samples each.
    let trace = std::fs::read_to_string(&trace_path).unwrap();
    let lines: Vec<serde_json::Value> = trace
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 15);
    assert_eq!(lines[0]["stage"], "rescale");
    assert_eq!(lines[14]["stage"], "radial");
    assert_eq!(lines[0]["t"], 0.0);
    assert_eq!(lines[4]["t"], 1.0);
    for l in &lines {
        assert!(l["residual_constraint"].as_f64().unwrap() <= 1e-10);
        assert!(l["residual_relation"].as_f64().unwrap() <= 1e-10);
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn retract_fixes_su2_input() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-fixed-{}", std::process::id()));
    let out = charvar(&[
        "sample",
        "--group",
        "SU(2)",
        "--stratum",
        "irreducible",
        "--twist",
        "5",
        "--count",
        "1",
        "--seed",
        "8",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let rep_path = dir.join("rep_0000.json");
    let report = stdout_json(&charvar(&["retract", "--input", rep_path.to_str().unwrap()]));
    // SU(2) input sits on the fixed locus: the trace is constant and the
    // endpoint is the input class.
    assert_eq!(report["results"]["final_group"], "SU(2)");
    let endpoint = &report["results"]["endpoint"];
    let a = endpoint["a"].as_array().unwrap();
    let d = endpoint["d"].as_array().unwrap();
    assert!((a[0].as_f64().unwrap() - d[0].as_f64().unwrap()).abs() <= 1e-10);
    assert!((a[1].as_f64().unwrap() + d[1].as_f64().unwrap()).abs() <= 1e-10);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn empty_stratum_is_reported_not_failed() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-empty-{}", std::process::id()));
    let out = charvar(&[
        "sample",
        "--group",
        "SU(2)",
        "--stratum",
        "irreducible",
        "--twist",
        "1",
        "--count",
        "3",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["files"], serde_json::json!([]));
    assert!(!report["warnings"].as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn malformed_input_exits_2() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = charvar(&["classify", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // Missing file also exits 2.
    let out = charvar(&["classify", "--input", dir.join("absent.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // Out-of-range enumerate exits 2.
    let out = charvar(&["enumerate", "--rank", "4", "--twist", "5"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn relation_violation_is_warned_not_fatal() {
    let dir = std::env::temp_dir().join(format!("charvar-cli-warn-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // diag(e^{i/10 turn}, e^{-i/10 turn}) does not commute with the rotation
    // after squaring, so the relation fails for n = 2.
    let c = (0.2f64 * std::f64::consts::PI).cos();
    let s = (0.2f64 * std::f64::consts::PI).sin();
    let rep = serde_json::json!({
        "n": 2,
        "group": "SU(2)",
        "A": [[[c, s], [0.0, 0.0]], [[0.0, 0.0], [c, -s]]],
        "B": [[[0.0, 0.0], [-1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],
    });
    let path = dir.join("violating.json");
    std::fs::write(&path, serde_json::to_string(&rep).unwrap()).unwrap();
    let out = charvar(&["classify", "--input", path.to_str().unwrap()]);
    assert!(out.status.success(), "relation violation should not be fatal");
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["relation_ok"], false);
    assert!(!report["warnings"].as_array().unwrap().is_empty());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn env_seed_fallback() {
    let dir1 = std::env::temp_dir().join(format!("charvar-cli-env1-{}", std::process::id()));
    let dir2 = std::env::temp_dir().join(format!("charvar-cli-env2-{}", std::process::id()));
    let run = |d: &std::path::Path| {
        Command::new(env!("CARGO_BIN_EXE_charvar"))
            .args([
                "sample",
                "--group",
                "SU(2)",
                "--stratum",
                "totally-reducible",
                "--twist",
                "3",
                "--count",
                "1",
                "--out-dir",
                d.to_str().unwrap(),
            ])
            .env("CHARVAR_SEED", "99")
            .output()
            .expect("binary runs")
    };
    assert!(run(&dir1).status.success());
    assert!(run(&dir2).status.success());
    let a = std::fs::read_to_string(dir1.join("rep_0000.json")).unwrap();
    let b = std::fs::read_to_string(dir2.join("rep_0000.json")).unwrap();
    assert_eq!(a, b);
    std::fs::remove_dir_all(&dir1).ok();
    std::fs::remove_dir_all(&dir2).ok();
}

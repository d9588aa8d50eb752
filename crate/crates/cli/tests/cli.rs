use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use relepr::kinematics::{four_velocity_from_velocity, relative_four_velocity, RelVelocity};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relepr"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Writes `json` to a temporary scenario file.
fn scenario(dir: &tempfile::TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

/// `key,v0,v1,...` lines of the transform table.
fn table(text: &str) -> Vec<(String, Vec<f64>)> {
    text.lines()
        .map(|l| {
            let mut it = l.split(',');
            let key = it.next().unwrap().to_string();
            (key, it.map(|x| x.parse().unwrap()).collect())
        })
        .collect()
}

fn lookup<'a>(t: &'a [(String, Vec<f64>)], key: &str) -> &'a [f64] {
    &t.iter().find(|(k, _)| k == key).unwrap().1
}

/// Column of the single data row of `correlate` output.
fn column(text: &str, name: &str) -> String {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    row[i].to_string()
}

#[test]
fn transform_at_rest_is_identity() {
    let o = run(&["transform", "--sigma-a", "0,0,0", "--sigma-b", "0,0,0"]);
    assert!(o.status.success());
    let t = table(&stdout(&o));
    for i in 0..4 {
        let row = lookup(&t, &format!("D[{i}]"));
        for (j, x) in row.iter().enumerate() {
            assert_eq!(*x, if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn transform_relative_velocity_matches_library() {
    let o = run(&["transform", "--sigma-a", "0,0,0", "--sigma-b", "0.001,0,0"]);
    assert!(o.status.success());
    let t = table(&stdout(&o));
    let w = relative_four_velocity(
        &four_velocity_from_velocity(&RelVelocity::zero()),
        &four_velocity_from_velocity(&RelVelocity::new(0.001, 0.0, 0.0)),
    )
    .unwrap();
    let printed = lookup(&t, "w");
    assert_eq!(printed, &[w.t, w.space.x, w.space.y, w.space.z]);
}

#[test]
fn malformed_and_singular_transform_inputs() {
    let o = run(&["transform", "--sigma-a", "abc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = run(&["transform", "--sigma-a", "0.9,0,0", "--velocity", "-1.5,0,0"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn correlate_standard_limits() {
    let dir = tempfile::tempdir().unwrap();
    let same = scenario(
        &dir,
        "same.json",
        r#"{"pf_velocity_A": [0.2, -0.1, 0.4], "relative_velocity_V": [0, 0, 0],
            "analyzer_a": [1, 2, 2], "analyzer_b": [0, 0, 1]}"#,
    );
    let rest = scenario(
        &dir,
        "rest.json",
        r#"{"pf_velocity_A": [0, 0, 0], "pf_velocity_B": [0.5, 0.3, -0.6],
            "analyzer_a": [1, 2, 2], "analyzer_b": [0, 0, 1]}"#,
    );
    // a·b = 2/3
    for path in [same, rest] {
        let o = run(&["correlate", "--scenario", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let exact: f64 = column(&stdout(&o), "exact").parse().unwrap();
        assert!((exact + 0.25 * 2.0 / 3.0).abs() < 1e-12, "{exact}");
    }
}

#[test]
fn correlate_perpendicular_correction_scale() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(
        &dir,
        "perp.json",
        r#"{"pf_velocity_A": [0.001, 0, 0], "pf_velocity_B": [0, 0.001, 0],
            "analyzer_a": [1, 0, 0], "analyzer_b": [0, 1, 0], "normalized": true}"#,
    );
    let o = run(&["correlate", "--scenario", path.to_str().unwrap(), "--formula", "exact"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("exact_normalized\n"));
    let value: f64 = text.lines().nth(1).unwrap().parse().unwrap();
    assert!(value.abs() <= 5e-7 + 1e-12 && value.abs() > 4e-7, "{value}");
}

#[test]
fn correlate_high_velocity_singularities() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario(
        &dir,
        "anti.json",
        r#"{"pf_velocity_A": [0, 0, 5], "pf_velocity_B": [0, 0, -5],
            "analyzer_a": [1, 0, 0], "analyzer_b": [0, 1, 0]}"#,
    );
    let p = path.to_str().unwrap();
    let o = run(&["correlate", "--scenario", p]);
    assert!(o.status.success());
    assert_eq!(column(&stdout(&o), "high"), "singular");
    let o = run(&["correlate", "--scenario", p, "--formula", "high"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn correlate_rejects_bad_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"pf_velocity_A": [0, 0, 0], "analyzer_a": [1, 0, 0], "analyzer_b": [0, 1, 0]}"#,
        r#"{"pf_velocity_A": [0, 0], "pf_velocity_B": [0, 0, 0], "analyzer_a": [1, 0, 0], "analyzer_b": [0, 1, 0]}"#,
        r#"{"pf_velocity_A": [0, 0, 0], "pf_velocity_B": [0, 0, 0], "analyzer_a": [0, 0, 0], "analyzer_b": [0, 1, 0]}"#,
        r#"{"pf_velocity_A": [0, 0, 0], "pf_velocity_B": [0, 0, 0], "analyzer_a": [1, 0, 0], "analyzer_b": [0, 1, 0], "state": "triplet"}"#,
        "not json",
    ];
    for (i, json) in cases.iter().enumerate() {
        let path = scenario(&dir, &format!("bad{i}.json"), json);
        let o = run(&["correlate", "--scenario", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
    }
    let o = run(&["correlate", "--scenario", "/nonexistent/file.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn correlate_explicit_state() {
    let dir = tempfile::tempdir().unwrap();
    // |↑⟩|m=-1⟩ along z: ⟨S_z⟩⟨S_z⟩ = -1/2
    let path = scenario(
        &dir,
        "product.json",
        r#"{"pf_velocity_A": [0, 0, 0], "pf_velocity_B": [0, 0, 0],
            "analyzer_a": [0, 0, 1], "analyzer_b": [0, 0, 1], "spin_beta": 1,
            "state": [[[0, 0], [0, 0], [2, 0]], [[0, 0], [0, 0], [0, 0]]]}"#,
    );
    let o = run(&["correlate", "--scenario", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let exact: f64 = column(&text, "exact").parse().unwrap();
    assert!((exact + 0.5).abs() < 1e-14);
    assert_eq!(column(&text, "small"), "n/a");
}

#[test]
fn shipped_oracle_scenarios() {
    let o = run(&["oracle", "--scenario", shipped("singlet_rest.json").to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    for key in ["sequential", "joint", "closed_form"] {
        let line = text.lines().find(|l| l.starts_with(&format!("{key},"))).unwrap();
        let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v + 0.25).abs() < 1e-12, "{key} {v}");
    }

    let o = run(&["oracle", "--scenario", shipped("moving_frames.json").to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{key},"))).unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert!(value("max_difference") <= 1e-10);
    // a⃗·b⃗ = 0, so any nonzero value is the Wigner correction
    assert!(value("sequential").abs() > 1e-3);

    let o = run(&["oracle", "--scenario", shipped("overlap.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn oracle_tolerance_gates_exit_code() {
    let path = shipped("moving_frames.json");
    let o = run(&["oracle", "--scenario", path.to_str().unwrap(), "--tolerance", "0"]);
    // three floating-point paths essentially never agree bit for bit here
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("max_difference,"));
}

#[test]
fn scan_rows_are_alpha_major_with_trivial_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&[
        "scan-perp",
        "--scenario",
        shipped("perpendicular_scan.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,beta,c_perp,c_exact_correction"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 13 * 13);
    for pair in rows.windows(2) {
        assert!(pair[0][0] < pair[1][0] || (pair[0][0] == pair[1][0] && pair[0][1] < pair[1][1]));
    }
    for r in &rows {
        if r[1] == 0.0 {
            assert!(r[2].abs() <= 1e-12 && r[3].abs() <= 1e-12);
        }
        if r[0] == std::f64::consts::FRAC_PI_2 {
            assert!(r[2].abs() <= 1e-12);
        }
    }
}

#[test]
fn scan_rejects_degenerate_axes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = scenario(
        &dir,
        "scan.json",
        r#"{"alpha": {"start": 0, "end": 1, "steps": 1}, "beta": {"start": 0, "end": 1, "steps": 3},
            "speed_a": 0.001, "speed_b": 0.001}"#,
    );
    let out = dir.path().join("never.csv");
    let o = run(&["scan-perp", "--scenario", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use kinsy::cones::ConeFamily;
use kinsy::motion::TimeInstant;
use kinsy::oracle::{brute_all_nn, brute_semi_yao};
use kinsy::scenario::parse_scenario;

fn kinsy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinsy"))
        .args(args)
        .output()
        .expect("run kinsy")
}

fn gen(dir: &Path, n: usize, degree: usize, seed: u64) -> String {
    let path = dir.join(format!("s{}_{}_{}.txt", n, degree, seed));
    let out = kinsy(&[
        "gen",
        "--n",
        &n.to_string(),
        "--degree",
        &degree.to_string(),
        "--seed",
        &seed.to_string(),
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let sc = gen(dir.path(), 12, 1, 3);
    let out_dir = dir.path().join("out");
    let out = kinsy(&[
        "verify",
        &sc,
        "--mode",
        "ann",
        "--checkpoints",
        "5",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = csv_rows(&out_dir.join("report.csv"));
    assert_eq!(report.len(), 6);
    assert!(report.iter().all(|r| r.last().unwrap() == "pass"));
    for f in ["events.csv", "summary.csv", "edges.csv", "nn.csv"] {
        assert!(out_dir.join(f).exists(), "{}", f);
    }
    let events = fs::read_to_string(out_dir.join("events.csv")).unwrap();
    assert!(events.starts_with("t,kind,cone,axis,id_a,id_b,changes_emitted\n"));
}

#[test]
fn eps_mode_reports_ratios_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let sc = gen(dir.path(), 10, 1, 4);
    let out_dir = dir.path().join("out");
    let out = kinsy(&[
        "verify",
        &sc,
        "--mode",
        "eps-ann",
        "--eps",
        "0.5",
        "--checkpoints",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for row in csv_rows(&out_dir.join("eps.csv")) {
        let ratio: f64 = row[2].parse().unwrap();
        assert!(ratio <= 1.5 + 1e-9);
    }
}

#[test]
fn injected_fault_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let sc = gen(dir.path(), 12, 1, 5);
    let out = kinsy(&[
        "verify",
        &sc,
        "--inject-fault",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divergence"));
}

#[test]
fn empty_scenario_runs_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("empty.txt");
    fs::write(&sc, "dim 2\ndegree 1\n").unwrap();
    for cmd in ["construct", "simulate", "verify"] {
        let out = kinsy(&[cmd, sc.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}: {}",
            cmd,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(kinsy(&["simulate"]).status.code(), Some(2));
    assert_eq!(kinsy(&["gen", "--n", "3", "--dim", "4"]).status.code(), Some(2));
    assert_eq!(kinsy(&["simulate", "/nonexistent/scenario.txt"]).status.code(), Some(2));
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "dim 2\ndegree 1\npoint 0 | 0 | zz\n").unwrap();
    let out = kinsy(&["simulate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn construct_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let sc = gen(dir.path(), 40, 2, 6);
    let out_dir = dir.path().join("out");
    let out = kinsy(&["construct", &sc, "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let scenario = parse_scenario(&fs::read_to_string(&sc).unwrap()).unwrap();
    let mut points = scenario.points.clone();
    points.sort_by_key(|p| p.point_id);
    let family = Arc::new(ConeFamily::build(2, std::f64::consts::FRAC_PI_3, true).unwrap());
    let t = TimeInstant::zero();
    let g = brute_semi_yao(&points, &family, &t);
    let mut want = BTreeSet::new();
    for (w, row) in g.targets.iter().enumerate() {
        for (l, q) in row.iter().enumerate() {
            if let Some(q) = q {
                want.insert((points[w].point_id, l, points[*q as usize].point_id));
            }
        }
    }
    let got: BTreeSet<(u64, usize, u64)> = csv_rows(&out_dir.join("edges.csv"))
        .into_iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    assert_eq!(got, want);
    let nn = brute_all_nn(&points, &t);
    for row in csv_rows(&out_dir.join("nn.csv")) {
        let p: u64 = row[0].parse().unwrap();
        let idx = points.iter().position(|x| x.point_id == p).unwrap();
        let want = nn[idx]
            .map(|q| points[q as usize].point_id.to_string())
            .unwrap_or_default();
        assert_eq!(row[1], want);
    }
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sc = gen(dir.path(), 16, 2, 7);
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out_dir = dir.path().join(format!("run{}", k));
        let out = kinsy(&["verify", &sc, "--mode", "ann", "--out-dir", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let files: Vec<Vec<u8>> = ["events.csv", "summary.csv", "edges.csv", "nn.csv", "report.csv"]
            .iter()
            .map(|f| fs::read(out_dir.join(f)).unwrap())
            .collect();
        outputs.push((files, out.stdout));
    }
    assert_eq!(outputs[0], outputs[1]);
    // Regenerating from the same seed gives the same file.
    let again = fs::read(gen(dir.path(), 16, 2, 7)).unwrap();
    assert_eq!(again, fs::read(&sc).unwrap());
}

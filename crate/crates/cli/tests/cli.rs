use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: Vec<u8>,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.stdout).expect("stdout is one JSON document")
    }
}

fn spherekern(args: &[&str]) -> Run {
    let Output { status, stdout, stderr } = Command::new(env!("CARGO_BIN_EXE_spherekern"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: status.code().expect("exit code"),
        stdout,
        stderr: String::from_utf8_lossy(&stderr).into_owned(),
    }
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_vec(value).unwrap()).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn geometric(mask: Value) -> Value {
    json!({"m": 2, "M": 2, "scheme": {"type": "geometric", "c": 1.0, "r": 0.5, "q": 0.5, "mask": mask}})
}

fn sparse(m: Value, big_m: Value, entries: Value) -> Value {
    json!({"m": m, "M": big_m, "scheme": {"type": "sparse", "entries": entries}})
}

/// Deterministic points on S^2 x S^2 from a small LCG (kept independent of the library).
fn points(n: usize, seed: u64, antipodal: bool) -> Value {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    };
    let mut unit = || {
        let v = [next(), next(), next()];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        vec![v[0] / norm, v[1] / norm, v[2] / norm]
    };
    let mut pts: Vec<(Vec<f64>, Vec<f64>)> = (0..n).map(|_| (unit(), unit())).collect();
    if antipodal {
        let negated: Vec<_> = pts
            .iter()
            .map(|(x, w)| (x.iter().map(|v| -v).collect(), w.iter().map(|v| -v).collect()))
            .collect();
        pts.extend(negated);
    }
    Value::Array(pts.into_iter().map(|(x, w)| json!({"x": x, "w": w})).collect())
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn classify_verdicts() {
    let dir = TempDir::new().unwrap();
    let all = write(&dir, "all.json", &geometric(json!("all")));
    let run = spherekern(&["classify", "--config", p(&all)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.json()["result"]["verdict"]["level"], "SPD");

    let even = write(&dir, "even.json", &geometric(json!("even_sum")));
    let run = spherekern(&["classify", "--config", p(&even)]);
    let v = run.json();
    assert_eq!(v["result"]["verdict"]["level"], "PD_ONLY");
    assert_eq!(v["result"]["verdict"]["reasons"]["odd_sum_infinite"], false);

    let three = write(&dir, "three.json", &geometric(json!([[0, 0], [1, 0], [0, 1]])));
    assert_eq!(spherekern(&["classify", "--config", p(&three)]).json()["result"]["verdict"]["level"], "DC_SPD_ONLY");

    let finite = write(&dir, "finite.json", &sparse(json!("inf"), json!(3), json!([[0, 0, 1.0], [3, 1, 0.5]])));
    let v = spherekern(&["classify", "--config", p(&finite)]).json();
    assert_eq!(v["result"]["verdict"]["level"], "PD_ONLY");
    assert_eq!(v["result"]["verdict"]["finite_support_caveat"], true);
    assert_eq!(v["result"]["m"], "inf");
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"m\": 2,\n \"M\": 2,\n \"scheme\": {\"type\": \"sparse\", \"entries\": [[0, 0, 1.0]]\n").unwrap();
    let run = spherekern(&["classify", "--config", p(&broken)]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("line"), "{}", run.stderr);
    assert!(run.stdout.is_empty());

    let bad_mask = write(&dir, "mask.json", &geometric(json!("diagonal")));
    let run = spherekern(&["classify", "--config", p(&bad_mask)]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("scheme.mask"), "{}", run.stderr);

    let zero = write(&dir, "zero.json", &sparse(json!(2), json!(2), json!([[0, 0, 0.0]])));
    assert_eq!(spherekern(&["classify", "--config", p(&zero)]).code, 2);

    let ratio = write(&dir, "ratio.json", &json!({"m": 2, "M": 2, "scheme": {"type": "geometric", "r": 1.5, "q": 0.5}}));
    assert_eq!(spherekern(&["classify", "--config", p(&ratio)]).code, 2);

    assert_eq!(spherekern(&["classify"]).code, 2);
    assert_eq!(spherekern(&["classify", "--config", "/nonexistent/config.json"]).code, 2);
}

#[test]
fn circle_dimension_exit_3() {
    let dir = TempDir::new().unwrap();
    let circle = write(&dir, "circle.json", &sparse(json!(1), json!(2), json!([[0, 0, 1.0]])));
    let run = spherekern(&["classify", "--config", p(&circle)]);
    assert_eq!(run.code, 3);
    assert!(run.stderr.contains("unsupported sphere dimension 1"));
    let run = spherekern(&["project", "--family", "constant", "--m", "1", "--M", "2", "--kmax", "2", "--lmax", "2"]);
    assert_eq!(run.code, 3);
}

#[test]
fn gram_reports() {
    let dir = TempDir::new().unwrap();
    let constant = write(&dir, "c3.json", &sparse(json!(2), json!(2), json!([[0, 0, 3.0]])));
    let one = write(&dir, "one.json", &json!([{"x": [0.0, 0.0, 1.0], "w": [1.0, 0.0, 0.0]}]));
    let matrix_path = dir.path().join("matrix.json");
    let run = spherekern(&["gram", "--config", p(&constant), "--points", p(&one), "--matrix-out", p(&matrix_path)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v = run.json();
    assert_eq!(f(&v["result"]["min_eigenvalue"]), 3.0);
    assert_eq!(v["result"]["null_vector"], Value::Null);
    let matrix: Vec<Vec<f64>> = serde_json::from_slice(&std::fs::read(&matrix_path).unwrap()).unwrap();
    assert_eq!(matrix, vec![vec![3.0]]);

    let all = write(&dir, "all.json", &geometric(json!("all")));
    let forty = write(&dir, "forty.json", &points(40, 3, false));
    let v = spherekern(&["gram", "--config", p(&all), "--points", p(&forty)]).json();
    assert!(f(&v["result"]["min_eigenvalue"]) > 0.0);
    assert_eq!(v["result"]["null_vector"], Value::Null);

    let even = write(&dir, "even.json", &sparse(json!(2), json!(2), json!([[0, 0, 1.0], [1, 1, 1.0], [2, 0, 1.0], [2, 2, 0.5]])));
    let doubled = write(&dir, "doubled.json", &points(5, 8, true));
    let v = spherekern(&["gram", "--config", p(&even), "--points", p(&doubled)]).json();
    assert_eq!(v["result"]["null_vector"].as_array().expect("null vector").len(), 10);
}

#[test]
fn gram_input_errors() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "c.json", &sparse(json!(2), json!(3), json!([[0, 0, 1.0]])));
    let short_w = write(&dir, "short.json", &json!([{"x": [1.0, 0.0, 0.0], "w": [0.0, 1.0, 0.0]}]));
    assert_eq!(spherekern(&["gram", "--config", p(&config), "--points", p(&short_w)]).code, 4);

    let not_unit = write(&dir, "long.json", &json!([{"x": [2.0, 0.0, 0.0], "w": [0.0, 1.0, 0.0, 0.0]}]));
    assert_eq!(spherekern(&["gram", "--config", p(&config), "--points", p(&not_unit)]).code, 2);

    let malformed = write(&dir, "bad.json", &json!([{"x": [1.0, 0.0, 0.0]}]));
    assert_eq!(spherekern(&["gram", "--config", p(&config), "--points", p(&malformed)]).code, 2);
}

#[test]
fn witness_dispatch() {
    let dir = TempDir::new().unwrap();
    let bounded = write(&dir, "bounded.json", &sparse(json!(2), json!(2), json!([[0, 0, 1.0], [2, 0, 1.0], [2, 1, 0.5]])));
    let run = spherekern(&["witness", "--config", p(&bounded)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v = run.json();
    let w = &v["result"]["witness"];
    assert_eq!(v["result"]["strategy"], "gamma");
    assert_eq!(w["kind"]["n"], 7);
    assert_eq!(w["n_points"], 49);
    assert!(f(&w["quadratic_form_value"]).abs() <= 1e-10);
    assert_eq!(w["certified"], true);

    let entries: Vec<Value> = (0..=3).flat_map(|k| (0..=3).map(move |l| json!([k, l, 1.0]))).collect();
    let full = write(&dir, "full.json", &sparse(json!(2), json!(2), Value::Array(entries)));
    let v = spherekern(&["witness", "--config", p(&full)]).json();
    assert_eq!(v["result"]["strategy"], "antipodal_doubling");
    let w = &v["result"]["witness"];
    assert!(f(&w["quadratic_form_value"]).abs() <= 1e-10 * f(&w["trace"]));

    let three = write(&dir, "three.json", &geometric(json!([[0, 0], [1, 0], [0, 1]])));
    let v = spherekern(&["witness", "--config", p(&three)]).json();
    assert_eq!(v["result"]["level"], "DC_SPD_ONLY");
    assert_eq!(v["result"]["strategy"], "empty_quadrant");
    assert_eq!(v["result"]["witness"]["n_points"], 4);

    let all = write(&dir, "all.json", &geometric(json!("all")));
    let run = spherekern(&["witness", "--config", p(&all)]);
    assert_eq!(run.code, 5);
    assert_eq!(run.json()["result"]["witness"], Value::Null);

    let mixed = write(&dir, "mixed.json", &sparse(json!(2), json!(2), json!([[1, 0, 1.0], [0, 1, 1.0], [1, 1, 1.0], [2, 2, 1.0]])));
    let run = spherekern(&["witness", "--config", p(&mixed), "--max-half", "1"]);
    assert_eq!(run.code, 6);
    assert!(run.stderr.contains("no witness found"), "{}", run.stderr);
}

#[test]
fn project_builtins_and_samples() {
    let run = spherekern(&["project", "--family", "geometric", "--r", "0.5", "--q", "0.5", "--m", "2", "--M", "2", "--kmax", "6", "--lmax", "6"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v = run.json();
    let rows: Vec<Vec<f64>> = serde_json::from_value(v["result"]["coefficients"].clone()).unwrap();
    for (k, row) in rows.iter().enumerate() {
        for (l, a) in row.iter().enumerate() {
            assert!((a - 0.5f64.powi((k + l) as i32)).abs() <= 1e-8, "({k},{l}) {a}");
        }
    }
    assert_eq!(v["result"]["positive_definite_at_truncation"], true);

    let v = spherekern(&["project", "--family", "constant", "--c", "2.5", "--m", "3", "--M", "4", "--kmax", "3", "--lmax", "3"]).json();
    let rows: Vec<Vec<f64>> = serde_json::from_value(v["result"]["coefficients"].clone()).unwrap();
    for (k, row) in rows.iter().enumerate() {
        for (l, a) in row.iter().enumerate() {
            let want = if (k, l) == (0, 0) { 2.5 } else { 0.0 };
            assert!((a - want).abs() <= 1e-10);
        }
    }

    let run = spherekern(&["project", "--family", "geometric", "--r", "-0.5", "--q", "0.5", "--m", "2", "--M", "2", "--kmax", "4", "--lmax", "4"]);
    assert_eq!(run.code, 0);
    let v = run.json();
    assert_eq!(v["result"]["positive_definite_at_truncation"], false);
    let flagged = v["result"]["negative_entries"].as_array().unwrap();
    assert!(flagged.iter().all(|e| e[0].as_u64().unwrap() % 2 == 1));
    assert!(run.stderr.contains("not positive definite"));

    // sampled Legendre product P_1(t) P_2(s)
    let dir = TempDir::new().unwrap();
    let axis: Vec<f64> = (0..81).map(|i| -1.0 + i as f64 / 40.0).collect();
    let values: Vec<Vec<f64>> = axis.iter().map(|&t| axis.iter().map(|&s| t * (1.5 * s * s - 0.5)).collect()).collect();
    let samples = write(&dir, "samples.json", &json!({"t": axis, "s": axis, "values": values}));
    let run = spherekern(&["project", "--samples", p(&samples), "--m", "2", "--M", "2", "--kmax", "3", "--lmax", "3"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rows: Vec<Vec<f64>> = serde_json::from_value(run.json()["result"]["coefficients"].clone()).unwrap();
    for (k, row) in rows.iter().enumerate() {
        for (l, a) in row.iter().enumerate() {
            let want = if (k, l) == (1, 2) { 1.0 } else { 0.0 };
            assert!((a - want).abs() <= 1e-9, "({k},{l}) {a}");
        }
    }

    let coarse: Vec<f64> = (0..9).map(|i| -1.0 + i as f64 / 4.0).collect();
    let thin = write(&dir, "thin.json", &json!({"t": coarse, "s": coarse, "values": vec![vec![1.0; 9]; 9]}));
    let run = spherekern(&["project", "--samples", p(&thin), "--m", "2", "--M", "2", "--kmax", "3", "--lmax", "3"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("insufficient sampling"));
}

#[test]
fn eval_matches_generating_function() {
    let dir = TempDir::new().unwrap();
    let all = write(&dir, "all.json", &geometric(json!("all")));
    let (t, s) = (0.3, -0.7);
    let v = spherekern(&["eval", "--config", p(&all), "--t", "0.3", "--s", "-0.7", "--tol", "1e-12"]).json();
    let exact = (1.0 - t + 0.25f64).powf(-0.5) * (1.0 - s + 0.25f64).powf(-0.5);
    assert!((f(&v["result"]["value"]) - exact).abs() <= 1e-11);
    assert_eq!(spherekern(&["eval", "--config", p(&all), "--t", "1.5", "--s", "0"]).code, 2);
}

#[test]
fn reports_are_deterministic_and_precise() {
    let dir = TempDir::new().unwrap();
    let full = write(&dir, "mixed.json", &sparse(json!(2), json!(3), json!([[0, 0, 1.0], [1, 0, 0.5], [2, 1, 0.25]])));
    let first = spherekern(&["witness", "--config", p(&full), "--seed", "42"]);
    let second = spherekern(&["witness", "--config", p(&full), "--seed", "42"]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert_eq!(first.stdout, second.stdout);
    let other = spherekern(&["witness", "--config", p(&full), "--seed", "43"]);
    assert_ne!(first.json()["inputs_digest"], other.json()["inputs_digest"]);

    let out = dir.path().join("report.json");
    let third = spherekern(&["witness", "--config", p(&full), "--seed", "42", "--out", p(&out)]);
    assert!(third.stdout.is_empty());
    assert_eq!(std::fs::read(&out).unwrap(), first.stdout);

    // every float carries 17 significant digits
    let text = String::from_utf8(first.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let c = v["result"]["witness"]["coefficients"][0].as_f64().unwrap();
    assert!(text.contains(&format!("{c:.16e}")));
    assert_eq!(v["wall_time_s"], Value::Null);

    let timed = spherekern(&["witness", "--config", p(&full), "--timing"]).json();
    assert!(timed["wall_time_s"].as_f64().unwrap() >= 0.0);
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zonobal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zonobal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_wall_ms(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.contains("wall_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn strip_check_default_grid() {
    let out = zonobal(&["strip-check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a_norm,t,lhs,rhs,pass");
    assert_eq!(lines.len(), 91);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn hadamard_balance_is_not_below_the_optimum() {
    let out = zonobal(&["balance-kk", "--d", "4", "--hadamard", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let rep = &v["reports"][0];
    assert_eq!(rep["d"], 4);
    let norm = rep["final_norm_K"].as_f64().unwrap();
    // The body is already normalized, so ‖Σxⱼ√d·eⱼ‖_K = ‖Hx‖∞ for the
    // Sylvester matrix H; enumerate all sign vectors directly.
    let h = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 1.0, -1.0, -1.0],
        [1.0, -1.0, -1.0, 1.0],
    ];
    let mut best = f64::INFINITY;
    for bits in 0..16u32 {
        let x: Vec<f64> = (0..4)
            .map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 })
            .collect();
        let val = h
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max);
        best = best.min(val);
    }
    assert_eq!(best, 2.0);
    assert!(norm >= best - 1e-9, "{norm} < {best}");
    let coloring = v["details"][0]["coloring"].as_array().unwrap();
    assert!(coloring.iter().all(|c| c.as_f64().unwrap().abs() == 1.0));
}

#[test]
fn identical_seeds_give_identical_json() {
    let args = ["balance-kk", "--d", "4", "--seeds", "0..3"];
    let a = zonobal(&args);
    let b = zonobal(&[&args[..], &["--jobs", "2"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_wall_ms(&a.stdout), without_wall_ms(&b.stdout));

    let args = [
        "measure",
        "--d",
        "4",
        "--t",
        "1.5",
        "--samples",
        "3000",
        "--seeds",
        "4,5",
    ];
    assert_eq!(zonobal(&args).stdout, zonobal(&args).stdout);
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("o.json");
    let out = zonobal(&[
        "oracle",
        "--hadamard",
        "--d",
        "8",
        "--gauge",
        "linf",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rep = &v["reports"][0];
    assert_eq!(rep["seed"], 3);
    // every signed sum of √8·eⱼ has sup norm √8
    assert!((rep["optimum"].as_f64().unwrap() - 8f64.sqrt()).abs() < 1e-12);
    assert_eq!(rep["agree"], true);
}

#[test]
fn measure_csv_columns() {
    let out = zonobal(&[
        "measure",
        "--d",
        "3",
        "--n",
        "2",
        "--t",
        "1,2",
        "--samples",
        "2000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,m,n,t,C,N,p_hat,ci,bound,pass"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn config_file_is_read_and_checked() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"{"command": "measure", "d": [2], "t": 1.0, "n_samples": 500, "seeds": [7], "format": "json"}"#,
    );
    let out = zonobal(&["measure", "--config", &good]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seeds"][0], 7);
    assert_eq!(v["reports"][0]["N"], 500);
    assert_eq!(v["reports"][0]["d"], 2);

    let unknown = write(dir.path(), "unknown.json", r#"{"d": 4, "dimension": 4}"#);
    assert_eq!(
        zonobal(&["measure", "--config", &unknown]).status.code(),
        Some(2)
    );
    let wrong = write(dir.path(), "wrong.json", r#"{"command": "oracle"}"#);
    assert_eq!(
        zonobal(&["measure", "--config", &wrong]).status.code(),
        Some(2)
    );
}

#[test]
fn invalid_parameters_exit_with_config_error() {
    assert_eq!(
        zonobal(&["balance-kk", "--hadamard", "--d", "6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zonobal(&["measure", "--d", "4", "--t", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zonobal(&["sparsify", "--input", "/nonexistent", "--epsilon", "0.2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        zonobal(&["strip-check", "--c-strip", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(zonobal(&["oracle", "--n", "21"]).status.code(), Some(2));
    assert_eq!(zonobal(&["suite", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn property_failure_exits_one_with_records() {
    let out = zonobal(&[
        "measure",
        "--d",
        "4",
        "--t",
        "1",
        "--c-measure",
        "0.2",
        "--samples",
        "20000",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["failures"][0]["property"], "section-bound");
    let line = String::from_utf8(out.stderr).unwrap();
    let rec: Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(rec["command"], "measure");
}

#[test]
fn file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(
        dir.path(),
        "body.txt",
        "# scale 0.5\n6 2\n1 0\n0 1\n1 1\n1 -1\n2 0.5\n-0.5 1\n",
    );
    let v = write(dir.path(), "vecs.txt", "3 2\n0.5 0.5\n-0.2 0.4\n0.1 -0.3\n");

    let out = zonobal(&["normalize", "--input", &k]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &json(&out)["reports"][0];
    let kt = zonobal::Zonotope::from_text(rep["k_tilde"].as_str().unwrap()).unwrap();
    assert_eq!(kt.segments(), rep["m_prime"].as_u64().unwrap() as usize);
    let g = kt.generators().gram();
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { 1.0 } else { 0.0 };
            assert!((g[(i, j)] - target).abs() < 1e-7);
        }
    }

    let out = zonobal(&["sparsify", "--input", &k, "--epsilon", "0.5", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &json(&out)["reports"][0];
    let expected = (40.0 * 2.0 * 3f64.ln() / 0.25).ceil() as u64;
    assert_eq!(rep["N"].as_u64().unwrap(), expected);

    let out = zonobal(&["balance-kk", "--zonotope", &k, "--vectors", &v]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["reports"][0]["instance_id"], "vecs");

    let out = zonobal(&[
        "balance-kq",
        "--zonotope",
        &k,
        "--vectors",
        &v,
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 2);

    let bad = write(dir.path(), "bad.txt", "2 2\n1 0\n");
    assert_eq!(
        zonobal(&["normalize", "--input", &bad]).status.code(),
        Some(2)
    );
}

#[test]
fn decompose_blocks_are_disjoint() {
    let out = zonobal(&["decompose", "--d", "2", "--m", "300", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = &json(&out)["reports"][0];
    let blocks = rep["blocks"].as_array().unwrap();
    let mut seen = std::collections::HashSet::new();
    for b in blocks {
        for i in b.as_array().unwrap() {
            assert!(seen.insert(i.as_u64().unwrap()));
        }
    }
    assert_eq!(blocks.len() as u64, rep["k"].as_u64().unwrap());
}

#[test]
fn suite_runs_selected_criteria() {
    let out = zonobal(&["suite", "--quick", "--only", "1,10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.lines().all(|l| l.starts_with("PASS")));
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dyadfit::simulation::{generate_features, GeneratorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn dyadfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dyadfit"))
        .args(args)
        .env_remove("DYADFIT_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Benchmark features for `n` nodes written as CSV.
fn write_features(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let spec = GeneratorSpec::benchmark(n, seed);
    let f = generate_features(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
    let mut text = String::from("node_id,V1,V2,V3,V4\n");
    for j in 0..n {
        write!(text, "{}", f.node_ids()[j]).unwrap();
        for k in 0..4 {
            write!(text, ",{}", f.group(k).row(j)[0]).unwrap();
        }
        text.push('\n');
    }
    let path = dir.join("features.csv");
    fs::write(&path, text).unwrap();
    path
}

fn write_theta(dir: &Path) -> PathBuf {
    let path = dir.join("theta.json");
    fs::write(&path, r#"{"theta": [6, -6, 6, 0, 0, 0, -6, 0, 0, 0, 6, 0, 0, 0]}"#).unwrap();
    path
}

fn assert_single_line_error(o: &Output, kind: &str, exit: i32) {
    assert_eq!(code(o), exit, "{}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error: kind={kind} code={exit} message=")), "{err}");
}

#[test]
fn sample_then_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let features = write_features(dir.path(), 60, 1);
    let theta = write_theta(dir.path());
    let edges = dir.path().join("edges.csv");
    let o = dyadfit(&["sample", "--theta", p(&theta), "--features", p(&features), "--seed", "7", "--out", p(&edges)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let first = fs::read(&edges).unwrap();
    dyadfit(&["sample", "--theta", p(&theta), "--features", p(&features), "--seed", "7", "--out", p(&edges)]);
    assert_eq!(fs::read(&edges).unwrap(), first);

    let out = dir.path().join("fit.json");
    let o = dyadfit(&["fit", "--edges", p(&edges), "--features", p(&features), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["method"], "rmle-path");
    assert_eq!(report["model"]["n"], 60);
    assert!(report["path"].is_null());
    let coef = fs::read_to_string(dir.path().join("fit.coefficients.csv")).unwrap();
    assert_eq!(coef.lines().count(), 15);
    let bytes = fs::read(&out).unwrap();
    dyadfit(&["fit", "--edges", p(&edges), "--features", p(&features), "--out", p(&out)]);
    assert_eq!(fs::read(&out).unwrap(), bytes);

    let out = dir.path().join("path.json");
    let table = dir.path().join("coefs.csv");
    let o = dyadfit(&[
        "path", "--edges", p(&edges), "--features", p(&features), "--out", p(&out), "--coefficients", p(&table),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert!(report["path"].as_array().unwrap().len() >= 50);
    assert!(table.exists());
}

#[test]
fn nodes_allowlist_restricts_the_fit() {
    let dir = tempfile::tempdir().unwrap();
    let features = write_features(dir.path(), 50, 2);
    let theta = write_theta(dir.path());
    let edges = dir.path().join("edges.csv");
    dyadfit(&["sample", "--theta", p(&theta), "--features", p(&features), "--seed", "1", "--out", p(&edges)]);
    let nodes = dir.path().join("nodes.csv");
    let keep: String = (1..=40).rev().map(|j| format!("n{j}\n")).collect();
    fs::write(&nodes, format!("node_id\n{keep}")).unwrap();
    let out = dir.path().join("sub.json");
    let o = dyadfit(&[
        "fit", "--edges", p(&edges), "--features", p(&features), "--nodes", p(&nodes), "--out", p(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["model"]["n"], 40);
    assert_eq!(report["model"]["n_dyads"], 780);

    fs::write(&nodes, "node_id\nnobody\n").unwrap();
    let o = dyadfit(&[
        "fit", "--edges", p(&edges), "--features", p(&features), "--nodes", p(&nodes), "--out", p(&out),
    ]);
    assert_single_line_error(&o, "input", 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_single_line_error(&dyadfit(&["fit", "--bogus"]), "usage", 1);
    assert_single_line_error(&dyadfit(&["frobnicate"]), "usage", 1);
    assert_single_line_error(&dyadfit(&[]), "usage", 1);
    assert_eq!(code(&dyadfit(&["--help"])), 0);
    assert_eq!(code(&dyadfit(&["--version"])), 0);

    let missing = dir.path().join("missing.csv");
    let out = dir.path().join("o.json");
    let o = dyadfit(&["fit", "--edges", p(&missing), "--features", p(&missing), "--out", p(&out)]);
    assert_single_line_error(&o, "input", 2);

    let features = write_features(dir.path(), 10, 3);
    let edges = dir.path().join("loop.csv");
    fs::write(&edges, "source,target\nn1,n1\n").unwrap();
    let o = dyadfit(&["fit", "--edges", p(&edges), "--features", p(&features), "--out", p(&out)]);
    assert_single_line_error(&o, "input", 2);
    assert!(stderr(&o).contains("self-loop"));

    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"level": 2}"#).unwrap();
    fs::write(&edges, "source,target\nn1,n2\n").unwrap();
    let o = dyadfit(&[
        "fit", "--edges", p(&edges), "--features", p(&features), "--config", p(&config), "--out", p(&out),
    ]);
    assert_single_line_error(&o, "input", 2);

    // Every edge present: the density estimate runs off to infinity.
    let full: String = (1..=10)
        .flat_map(|a| (1..=10).filter(move |&b| b != a).map(move |b| format!("n{a},n{b}\n")))
        .collect();
    fs::write(&edges, format!("source,target\n{full}")).unwrap();
    let o = dyadfit(&["fit", "--edges", p(&edges), "--features", p(&features), "--out", p(&out)]);
    assert_single_line_error(&o, "numeric", 3);

    let o = dyadfit(&["oracle-check", "--n", "9"]);
    assert_single_line_error(&o, "input", 2);
    assert_single_line_error(&dyadfit(&["--threads", "0", "oracle-check"]), "usage", 1);
}

#[test]
fn oracle_check_passes() {
    let o = dyadfit(&["oracle-check", "--n", "3", "--trials", "200", "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["graphs_per_trial"], 64);
    let o = dyadfit(&["oracle-check", "--n", "4", "--trials", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn simulate_ignores_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("study.json");
    fs::write(&config, r#"{"seed": 3, "replications": 6, "n_grid": [30, 40]}"#).unwrap();
    let run = |name: &str, threads: Option<&str>| {
        let out = dir.path().join(format!("{name}.json"));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dyadfit"));
        cmd.args(["simulate", "--config", p(&config), "--out", p(&out)]);
        match threads {
            Some(t) => cmd.env("DYADFIT_THREADS", t),
            None => cmd.env_remove("DYADFIT_THREADS"),
        };
        let o = cmd.output().unwrap();
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        [".json", ".table1.csv", ".table2.csv"].map(|s| fs::read(dir.path().join(format!("{name}{s}"))).unwrap())
    };
    let all = run("all", None);
    assert_eq!(run("one", Some("1")), all);
    assert_eq!(run("three", Some("3")), all);
    let table2 = String::from_utf8(all[2].clone()).unwrap();
    assert!(table2.starts_with("n,cf,cf_sd,tpr,tpr_sd,fpr,fpr_sd,ms,ms_sd\n"));
    assert_eq!(table2.lines().count(), 3);
}

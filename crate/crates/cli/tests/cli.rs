use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn profilekit(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_profilekit"));
    c.args(args).env_remove("PROFILEKIT_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    profilekit(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compress_round_trip_and_stream_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.txt");
    std::fs::write(&input, "a b a c a b\nd").unwrap();
    let (batch, stream) = (dir.path().join("b.prfl"), dir.path().join("s.prfl"));
    assert!(run(&["compress", "-i", path(&input), "-o", path(&batch)]).status.success());
    assert!(run(&["compress", "-i", path(&input), "-o", path(&stream), "--stream"]).status.success());
    assert_eq!(std::fs::read(&batch).unwrap(), std::fs::read(&stream).unwrap());

    let decoded = json(&run(&["decompress", path(&batch)]));
    let stats = json(&run(&["stats", "-i", path(&input)]));
    assert_eq!(decoded, stats["profile"]);
    assert_eq!(stats["n"], 7);
    assert_eq!(stats["distinct_symbols"], 4);
    // multiplicities 3, 2, 1, 1
    assert_eq!(stats["dimension"], 3);
}

#[test]
fn corrupt_block_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.prfl");
    std::fs::write(&bad, b"NOPE\x01\x00").unwrap();
    let out = run(&["decompress", path(&bad)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("decode error"));
}

#[test]
fn proxy_verbs() {
    let hs = json(&run(&["hs", "--family", "uniform:10", "-n", "100"]));
    assert!((hs["total"].as_f64().unwrap() - 2.0 * 100f64.ln()).abs() < 1e-12, "{hs}");
    let en = json(&run(&["en", "--family", "uniform:10", "-n", "100"]));
    assert!((en["value"].as_f64().unwrap() - 6.886936875343783).abs() < 1e-9, "{en}");
    let oracle = json(&run(&["oracle", "--family", "uniform:3", "-n", "2", "--delta", "0.5"]));
    assert_eq!(oracle["profiles"], 2);
    assert_eq!(oracle["typical_cardinality"], 1);
}

#[test]
fn simulate_is_deterministic_and_honours_seed_env() {
    let dir = tempfile::tempdir().unwrap();
    let reports: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("r{i}.json"));
            let status = profilekit(&["simulate", "compression", "--trials", "3", "--n-grid", "5,50", "--json", path(&out)])
                .env("PROFILEKIT_SEED", "77")
                .status()
                .unwrap();
            assert!(status.success());
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(reports[0], reports[1]);
    let v: Value = serde_json::from_str(&reports[0]).unwrap();
    assert_eq!(v["seed"], 77);
    assert_eq!(v["passed"], v["total"]);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        r#"{"suite": "concentration", "families": [{"family": "uniform", "k": 20}], "n_grid": [200], "trials": 500, "seed": 5}"#,
    )
    .unwrap();
    let out = run(&["simulate", "concentration", "--config", path(&cfg), "--trials", "20", "--csv", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rows = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        rows.headers().unwrap().iter().collect::<Vec<_>>(),
        ["suite", "case", "claim", "family", "n", "relation", "statistic", "bound", "margin", "pass", "detail"]
    );
    let records: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| &r[3] == "uniform:20" && &r[4] == "200"));
}

#[test]
fn pml_tester_refuses_large_alphabets() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("seq.txt");
    std::fs::write(&input, "x y z x").unwrap();
    let out = run(&["test-uniformity", "-i", path(&input), "--alphabet", "9", "--epsilon", "0.5", "--method", "pml"]);
    assert!(!out.status.success());
    let ok = json(&run(&["test-uniformity", "-i", path(&input), "--alphabet", "4", "--epsilon", "0.5"]));
    assert!(ok["t"].as_f64().is_some());
}

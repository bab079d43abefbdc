use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn elf(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elf"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const EXAMPLE: &str = r#"{
    "columns": [{"kind": "uniform", "card": 20}, {"kind": "uniform", "card": 5}, {"kind": "unique_key"}],
    "rows": 400, "seed": 3,
    "queries": {"n_queries": 25, "seed": 4,
                "sel_range": [{"lo": 0.2, "hi": 1.0}, {"lo": 0.2, "hi": 1.0}, {"lo": 1.0, "hi": 1.0}]}
}"#;

#[test]
fn gen_build_search_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(d.join("ex.json"), EXAMPLE).unwrap();

    let o = elf(&["gen", "ex.json", "--out", "data"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("data/relation.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["rows"], 400);
    assert_eq!(fs::read_to_string(d.join("data/queries.csv")).unwrap().lines().count(), 25);

    let o = elf(&["build", "data/relation.csv", "-o", "idx.elf", "--census", "census.csv"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(&fs::read(d.join("idx.elf")).unwrap()[..4], b"ELF1");
    let census = fs::read_to_string(d.join("census.csv")).unwrap();
    assert!(census.starts_with("depth,nodes,monolists,mean_fanout,mean_avgsize"));

    let o = elf(&["search", "idx.elf", "data/queries.csv", "--results", "hits.csv"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stats["queries"], 25);
    let hits = fs::read_to_string(d.join("hits.csv")).unwrap();
    assert_eq!(hits.lines().count() as u64 - 1, stats["matches"].as_u64().unwrap());
    assert!(stats["total_visits"].as_u64().unwrap() >= 25);
}

#[test]
fn predict_writes_csv_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("in.json"),
        r#"{"n_tuples": 20000, "cardinalities": [100, 50, 20000], "selectivities": [0.5, 0.5, 1.0]}"#,
    )
    .unwrap();
    let o = elf(&["predict", "in.json", "-o", "p.csv", "--summary", "p.json"], d);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.join("p.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("depth,visits,mono,avgsize,fanout"));
    assert_eq!(csv.lines().count(), 1 + 4);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("p.json")).unwrap()).unwrap();
    assert_eq!(summary["dims"], 3);
    assert!(summary["total"].as_f64().unwrap() > 1.0);
}

#[test]
fn bench_runs_a_preset_and_emits_report() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let o = elf(&["bench", "histogram_bias", "--scale", "0.05", "--reps", "1", "--out", "rep"], d);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("adjusted_error_ratio"), "{stdout}");
    assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    let csv = fs::read_to_string(d.join("rep/histogram_bias.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 20);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d.join("rep/histogram_bias.json")).unwrap()).unwrap();
    assert_eq!(json["scale"], 0.05);
}

#[test]
fn verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = elf(&["verify", "--cases", "30", "--max-rows", "500"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 mismatching"));
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(elf(&["bench"], tmp.path()).status.code(), Some(2));
    assert_eq!(elf(&["bench", "no_such_preset"], tmp.path()).status.code(), Some(2));
    assert_eq!(elf(&["build", "missing.csv", "-o", "x"], tmp.path()).status.code(), Some(2));
}

//! End-to-end runs of the `bfly` binary. JSON reports are compared against
//! files in `tests/golden` with timing fields removed; set `BFLY_BLESS=1` to
//! rewrite them.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bfly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bfly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    if let Some(map) = v.as_object_mut() {
        map.remove("elapsed_ms");
    }
    v
}

fn golden(name: &str, actual: &Value) {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    let rendered = serde_json::to_string_pretty(actual).unwrap() + "\n";
    if std::env::var_os("BFLY_BLESS").is_some() {
        std::fs::write(&path, &rendered).unwrap();
        return;
    }
    let expected =
        std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(rendered, expected, "golden mismatch for {name}");
}

#[test]
fn count_golden() {
    for algo in ["ibs", "vp", "vpp"] {
        let v = json(&bfly(&["count", "--algo", algo, &data("4cycle.txt")]));
        assert_eq!(v["butterflies"], 1);
        golden(&format!("count_{algo}_4cycle.json"), &v);
    }
    golden(
        "count_vpp_k32.json",
        &json(&bfly(&["count", &data("k32.txt")])),
    );
}

#[test]
fn stats_golden() {
    let v = json(&bfly(&["stats", &data("4cycle.txt")]));
    assert_eq!(v["clustering_coefficient"], 1.0);
    golden("stats_4cycle.json", &v);
    golden("stats_k32.json", &json(&bfly(&["stats", &data("k32.txt")])));
}

#[test]
fn edges_tsv() {
    let out = bfly(&["edges", "--format", "tsv", &data("k32.txt")]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.ends_with("\t2")), "{text}");
    assert_eq!(lines[0], "0\t0\t2");
}

#[test]
fn parallel_and_em_report_extra_sections() {
    let dir = tempfile::tempdir().unwrap();
    let hub = dir.path().join("hub.txt");
    let hub = hub.to_str().unwrap();
    assert!(bfly(&["gen", "hub", "--a", "200", "--b", "150", "-o", hub])
        .status
        .success());

    let par = json(&bfly(&[
        "parallel",
        "--threads",
        "3",
        "--schedule",
        "static",
        "--strategy",
        "random",
        hub,
    ]));
    let seq = json(&bfly(&["count", hub]));
    assert_eq!(par["butterflies"], seq["butterflies"]);
    assert_eq!(par["wedges_processed"], seq["wedges_processed"]);
    assert_eq!(par["threads"].as_array().unwrap().len(), 3);
    assert_eq!(par["schedule"]["strategy"], "random");

    let scratch = dir.path().to_str().unwrap();
    let em = json(&bfly(&[
        "em",
        "--memory-budget",
        "64K",
        "--block-size",
        "4K",
        "--scratch-dir",
        scratch,
        hub,
    ]));
    assert_eq!(em["butterflies"], seq["butterflies"]);
    assert_eq!(em["io"]["pairs_emitted"], seq["wedges_processed"]);
    assert!(em["io"]["blocks_read"].as_u64().unwrap() > 0);
}

#[test]
fn gen_round_trip_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hub.txt");
    let path = path.to_str().unwrap();
    assert!(
        bfly(&["gen", "hub", "--a", "1000", "--b", "1000", "--output", path])
            .status
            .success()
    );
    let v = json(&bfly(&["count", "--algo", "vp", path]));
    assert_eq!(v["butterflies"], 999_000);
    assert_eq!(v["wedges_processed"], 2_000);
    let v = json(&bfly(&["count", "--algo", "ibs", path]));
    assert_eq!(v["wedges_processed"], 1_000_000);
}

#[test]
fn approx_with_full_probability_is_exact() {
    let v = json(&bfly(&[
        "approx",
        "--p",
        "1.0",
        "--trials",
        "1",
        &data("k32.txt"),
    ]));
    assert_eq!(v["mean"], 3.0);
    assert_eq!(v["exact"], 3);
    assert_eq!(v["variance"], 0.0);
    let a = json(&bfly(&[
        "approx",
        "--p",
        "0.5",
        "--trials",
        "20",
        "--seed",
        "7",
        &data("k32.txt"),
    ]));
    let b = json(&bfly(&[
        "approx",
        "--p",
        "0.5",
        "--trials",
        "20",
        "--seed",
        "7",
        &data("k32.txt"),
    ]));
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1 2\n3 x\n").unwrap();
    let out = bfly(&["count", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let missing = dir.path().join("missing.txt");
    assert_eq!(
        bfly(&["count", missing.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        bfly(&["approx", "--p", "1.5", &data("k32.txt")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bfly(&["em", "--block-size", "512", &data("k32.txt")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bfly(&["count", "--threads", "2", &data("k32.txt")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        bfly(&["parallel", "--threads", "0", &data("k32.txt")])
            .status
            .code(),
        Some(2)
    );
}

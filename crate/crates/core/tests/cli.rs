use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pillow_core::cli::{Status, EXIT_DATA, EXIT_FAILURE, EXIT_IO, EXIT_NOT_CONVERGED, EXIT_OK, EXIT_USAGE};

fn pillow(dir: &Path, args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pillow"))
        .args(args.split_whitespace())
        .current_dir(dir)
        .output()
        .unwrap()
}

fn code(dir: &Path, args: &str) -> i32 {
    pillow(dir, args).status.code().unwrap()
}

fn stdout(dir: &Path, args: &str) -> String {
    let o = pillow(dir, args);
    assert!(o.status.success(), "{args}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

/// Raw bytes of a PLM1 table; provenance lives in the `.json` sidecar.
fn plm(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn build_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stdout(dir.path(), "build -n 1").trim(), "10 vertices, 17 edges");
    assert_eq!(stdout(dir.path(), "build -n 1 --policy off").trim(), "10 vertices, 16 edges");
    assert_eq!(stdout(dir.path(), "build -n 3 --out g.json").trim(), "1000 vertices, 2436 edges");
    let file: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(file["schema"], "pillow-graph-v1");
    assert_eq!(file["vertices"].as_array().unwrap().len(), 1000);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, "--help"), EXIT_OK);
    assert_eq!(code(d, "--version"), EXIT_OK);
    assert_eq!(code(d, "build -n 0"), EXIT_USAGE);
    assert_eq!(code(d, "build -n 7"), EXIT_USAGE);
    assert_eq!(code(d, "verify bogus"), EXIT_USAGE);
    assert_eq!(code(d, "verify quotient --levels 1..4"), EXIT_USAGE);
    assert_eq!(code(d, "modulus --from left --to left --levels 1..1"), EXIT_USAGE);
    assert_eq!(code(d, "modulus --from middle --levels 1..1"), EXIT_USAGE);
    assert_eq!(code(d, "measure dimension --variant balls -n 3"), EXIT_USAGE);
    assert_eq!(code(d, "metric symmetrize -n 2 --mode sampled --out s.plm"), EXIT_USAGE);
    assert_eq!(code(d, "modulus --levels 2..2 --p-grid 2 --max-iterations 3"), EXIT_NOT_CONVERGED);
    assert_eq!(code(d, "modulus --graph missing.json"), EXIT_IO);
    fs::write(d.join("bad.json"), "{\"x\": 1}").unwrap();
    assert_eq!(code(d, "modulus --graph bad.json"), EXIT_DATA);
    fs::write(d.join("bad.plm"), b"PLM1\x03").unwrap();
    assert_eq!(code(d, "metric blowup --input bad.plm --prefix 5 --out b.plm"), EXIT_DATA);
    assert_eq!(Status::Failed.code(), EXIT_FAILURE);
}

#[test]
fn verify_writes_a_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(dir.path(), "verify singular-measure --levels 1..5 --out v.json");
    assert!(out.lines().all(|l| l.starts_with("pass")), "{out}");
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["checks"].as_array().unwrap().len(), 5);
    assert_eq!(v["seed"], 0);
}

#[test]
fn modulus_csv_carries_provenance_and_min_cuts() {
    let dir = tempfile::tempdir().unwrap();
    stdout(dir.path(), "build -n 1 --out g1.json");
    let csv = stdout(dir.path(), "modulus --graph g1.json --p-grid 1,2");
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# pillow "));
    assert!(lines.iter().any(|l| l.starts_with("# input g1.json sha256 ")));
    assert!(lines.contains(&"# seed none"));
    assert!(lines.contains(&"# mincut level 1 4"));
    assert!(lines.iter().any(|l| l.starts_with("1,1,4.000000000000e0,4.000000000000e0,")));
}

#[test]
fn ratios_read_two_fifths() {
    let dir = tempfile::tempdir().unwrap();
    let csv = stdout(dir.path(), "measure ratios --level 4");
    assert!(csv.lines().any(|l| l == "# common ratio 2/5"));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.ends_with(",2/5")));
}

#[test]
fn symmetrize_fixes_the_graph_metric_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(d, "metric distances --level 2 --out d.plm");
    stdout(d, "metric symmetrize --level 2 --mode exact --out s.plm");
    assert_eq!(plm(d, "d.plm"), plm(d, "s.plm"));
    stdout(d, "metric symmetrize --input d.plm --mode exact --out t.plm");
    assert_eq!(plm(d, "d.plm"), plm(d, "t.plm"));
    assert!(d.join("t.plm.json").exists());
}

#[test]
fn blowup_of_a_level_four_block_is_g2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    stdout(d, "metric distances --level 2 --out g2.plm");
    stdout(d, "metric blowup --prefix 50 --level-from 4 --out b.plm");
    assert_eq!(plm(d, "g2.plm"), plm(d, "b.plm"));
}

#[test]
fn seeded_commands_rerun_identically() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        "measure dimension --variant balls -n 4 --seed 3 --format json",
        "metric pi-diagnostic -n 2 --trials 100 --seed 5",
        "metric cover-check -n 2 --balls 5 --seed 1",
        "verify sheets --levels 1..2 --seed 9",
    ] {
        assert_eq!(stdout(d, args), stdout(d, args), "{args}");
    }
    let a = stdout(d, "metric pi-diagnostic -n 2 --trials 100 --seed 5");
    let b = stdout(d, "metric pi-diagnostic -n 2 --trials 100 --seed 6");
    assert_ne!(a, b);
}

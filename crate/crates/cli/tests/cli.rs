use std::path::Path;
use std::process::{Command, Output};

use opmod::format::witness_from_json;

fn opmod(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opmod"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .env_remove("OPMOD_OUT_DIR")
        .output()
        .expect("run opmod")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn doi_check_residuals_are_small() {
    let dir = tempfile::tempdir().unwrap();
    let out = opmod(dir.path(), &["doi-check", "--dim", "8", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("doi_check.csv"));
    assert_eq!(rows.len(), 200);
    let worst = rows.iter().map(|r| r[4].parse::<f64>().unwrap()).fold(0.0, f64::max);
    assert!(worst <= 1e-10, "{worst}");
}

#[test]
fn conj_lattice_bounds_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let out = opmod(dir.path(), &["lattice-bound", "--delta", "1", "--r", "32", "--f", "conj"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("lattice_bound.csv"));
    let lower: f64 = rows[0][2].parse().unwrap();
    let upper: f64 = rows[0][3].parse().unwrap();
    assert!(lower > 5.9 && lower < upper, "{lower} {upper}");
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    let out_dir = dir.path().join("out");
    for body in [
        "{not json",
        r#"{"schema_version":2,"command":"omega","params":{}}"#,
        r#"{"schema_version":1,"command":"omega","params":{"delta_grid":"x"}}"#,
        r#"{"schema_version":1,"command":"teleport","params":{}}"#,
        r#"{"schema_version":1,"command":"omega","params":{},"workers":0}"#,
    ] {
        std::fs::write(&cfg, body).unwrap();
        let out = opmod(&out_dir, &["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{body}");
        assert!(!out_dir.exists(), "{body}");
    }
}

#[test]
fn invalid_parameters_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    for args in [
        &["lattice-bound", "--f", "bogus"][..],
        &["omega", "--modulus", "power:2"],
        &["omega", "--delta-grid", "1,0.5"],
        &["holder", "--alpha-grid", "1.5"],
        &["holder", "--f", "const:1,0"],
        &["search-extremal", "--kind", "Q"],
        &["lattice-bound", "--r", "2"],
        &["multnorm"],
    ] {
        let out = opmod(&out_dir, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out_dir.exists(), "{args:?}");
    }
}

#[test]
fn repeat_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (args, file) in [
        (&["search-extremal", "--delta-grid", "0.5,1", "--budget", "10"][..], "search_extremal.csv"),
        (&["doi-check", "--instances", "40"], "doi_check.csv"),
        (&["holder", "--quasi", "--instances", "50"], "holder.csv"),
    ] {
        assert_eq!(opmod(a.path(), args).status.code(), Some(0));
        let mut with_workers = args.to_vec();
        with_workers.extend(["--workers", "1"]);
        assert_eq!(opmod(b.path(), &with_workers).status.code(), Some(0));
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
}

#[test]
fn emitted_witnesses_revalidate() {
    let dir = tempfile::tempdir().unwrap();
    let out = opmod(dir.path(), &["search-extremal", "--kind", "U", "--f", "abs:0.5", "--delta-grid", "0.2,1", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut files = Vec::new();
    for k in 0..2 {
        let p = dir.path().join(format!("search_extremal_witness_{k}.json"));
        witness_from_json(&std::fs::read(&p).unwrap()).unwrap();
        files.push(p);
    }
    let check = dir.path().join("check");
    let mut args = vec!["search-extremal"];
    for p in &files {
        args.extend(["--input", p.to_str().unwrap()]);
    }
    assert_eq!(opmod(&check, &args).status.code(), Some(0));
    let rows = csv_rows(&check.join("search_extremal.csv"));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[0] == "U" && r[7] == "nan"));
}

#[test]
fn tampered_witness_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(opmod(dir.path(), &["search-extremal", "--delta-grid", "1", "--budget", "5"]).status.code(), Some(0));
    let p = dir.path().join("search_extremal_witness_0.json");
    let mut json: serde_json::Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    json["value"] = serde_json::json!(json["value"].as_f64().unwrap() * 2.0 + 1.0);
    std::fs::write(&p, serde_json::to_vec(&json).unwrap()).unwrap();
    let out = opmod(&dir.path().join("check"), &["search-extremal", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_echo_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    assert_eq!(opmod(&first, &["omega", "--modulus", "bounded:0.5,2"]).status.code(), Some(0));
    let cfg = first.join("omega.config.json");
    let second = dir.path().join("second");
    assert_eq!(opmod(&second, &["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(first.join("omega.csv")).unwrap(), std::fs::read(second.join("omega.csv")).unwrap());
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_opmod"))
        .args(["omega"])
        .env("OPMOD_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("omega.csv").exists());
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn reslab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reslab"));
    cmd.args(args).env_remove("RES_LAB_THREADS").env_remove("RES_LAB_PRECISION_BITS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stripped_report(out: &Output) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    for t in v["tasks"].as_array_mut().unwrap() {
        t["millis"] = 0.into();
    }
    v
}

#[test]
fn empty_scenario_exits_zero() {
    let out = reslab(&["eval", data("empty.json").to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = stripped_report(&out);
    assert_eq!(v["tasks"].as_array().unwrap().len(), 0);
}

#[test]
fn unknown_task_kind_exits_two() {
    let out = reslab(&["eval", data("bad_kind.json").to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn missing_file_exits_two() {
    let out = reslab(&["eval", data("nope.json").to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn misspelled_suite_exits_two() {
    let out = reslab(&["verify", "exact-residu"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_residue_suite_passes() {
    let path = std::env::temp_dir().join(format!("reslab-verify-{}.json", std::process::id()));
    let out = reslab(&["verify", "exact-residue", "--report", path.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("A-1") && text.contains("A-2"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    std::fs::remove_file(&path).ok();
}

#[test]
fn scenario_report_and_csv() {
    let dir = std::env::temp_dir().join(format!("reslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let json = dir.join("r.json");
    let csv = dir.join("r.csv");
    let out = reslab(
        &[
            "eval",
            data("circle.json").to_str().unwrap(),
            "--report",
            json.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
            "--terms",
        ],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["tasks"][0]["exact_part"], "-1");
    assert!(v["tasks"][0]["terms"].is_array());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 5);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_independent_of_thread_count() {
    let path = data("circle.json");
    let one = reslab(&["eval", path.to_str().unwrap()], &[("RES_LAB_THREADS", "1")]);
    let many = reslab(&["eval", path.to_str().unwrap(), "--threads", "4"], &[]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stripped_report(&one), stripped_report(&many));
}

#[test]
fn precision_bits_are_reported() {
    let out = reslab(&["eval", data("empty.json").to_str().unwrap()], &[("RES_LAB_PRECISION_BITS", "512")]);
    assert_eq!(stripped_report(&out)["precision_bits"], 512);
    let bad = reslab(&["eval", data("empty.json").to_str().unwrap()], &[("RES_LAB_PRECISION_BITS", "x")]);
    assert_eq!(bad.status.code(), Some(2));
}

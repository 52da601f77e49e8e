use std::process::{Command, Output};

fn preproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_preproj"))
        .args(args)
        .env("PREPROJ_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn dims_for_two_vertices() {
    let o = preproj(&["dims", "--n", "2", "--char", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "[4, 2, 2, 2, 2, 2, 2]");
}

#[test]
fn dims_json_has_schema() {
    let o = preproj(&["dims", "--n", "1..2", "--char", "0,5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);
}

#[test]
fn characteristic_two_is_a_usage_error() {
    let o = preproj(&["dims", "--n", "2", "--char", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Char(K) != 2"));
}

#[test]
fn malformed_ranges_are_usage_errors() {
    for bad in ["0", "4..2", "x"] {
        assert_eq!(preproj(&["dims", "--n", bad]).status.code(), Some(2), "{bad}");
    }
}

#[test]
fn verify_passes_in_both_regimes() {
    let o = preproj(&["verify", "--n", "1..3", "--char", "0,3,5,7", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains(",modular,"));
    assert!(text.contains(",generic,"));
}

#[test]
fn cmatrix_for_two_vertices() {
    let o = preproj(&["cmatrix", "--n", "2", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["results"][0]["entries"], "[[-2,1],[1,-3]]");
}

#[test]
fn oracle_budget_exit_code() {
    let o = preproj(&["oracle", "--n", "3", "--upto", "6", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(3));
    let o = preproj(&["oracle", "--n", "1..2", "--upto", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = preproj(&["run", "--n", "1..2", "--char", "0,3", "--maxdeg", "8", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 4);

    let md = preproj(&["report", out]);
    assert_eq!(md.status.code(), Some(0));
    assert_eq!(stdout(&md).matches("Overall: **pass**").count(), 4);

    let csv_path = dir.path().join("summary.csv");
    let csv = preproj(&["report", out, "--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(csv.status.code(), Some(0));
    let text = std::fs::read_to_string(csv_path).unwrap();
    assert!(text.starts_with("n,characteristic,"));
}

#[test]
fn report_on_empty_directory_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = preproj(&["report", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

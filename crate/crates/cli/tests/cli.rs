use std::process::Command;

use heckeval_cli::StructuredRecord;

fn eigen(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_eigen")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn tau_of_five() {
    let (code, out, _) = eigen(&["--level", "1", "--weight", "12", "--prime", "5", "--digits", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("exact: 4830"), "{out}");
}

#[test]
fn structured_output_round_trips() {
    let (code, out, _) = eigen(&["--level", "1", "--weight", "16", "--prime", "3", "--digits", "8", "--format", "structured"]);
    assert_eq!(code, 0);
    let line = out.trim_end();
    let rec = StructuredRecord::parse(line).unwrap();
    assert_eq!(rec.render(), line);
    assert_eq!(rec.p, 3);
    assert_eq!(rec.exact.as_deref(), Some("-3348"));
    assert_eq!(rec.method, "direct");
    assert_eq!(rec.z0, "0+1i");
}

#[test]
fn error_exit_codes() {
    let (code, _, err) = eigen(&["--level", "1", "--weight", "12", "--prime", "4", "--digits", "3"]);
    assert_eq!(code, 3);
    assert!(err.contains("not prime"));
    let (code, _, err) = eigen(&["--level", "5", "--weight", "4", "--prime", "7", "--digits", "3"]);
    assert_eq!(code, 3);
    assert!(err.contains("level 5"));
    let (code, _, _) = eigen(&["--level", "2", "--weight", "8", "--prime", "3", "--digits", "3", "--method", "eisenstein"]);
    assert_eq!(code, 2);
    let (code, _, _) = eigen(&["--level", "1", "--weight", "12", "--prime", "3"]);
    assert_eq!(code, 2);
    let (code, _, _) = eigen(&["--level", "1", "--weight", "14", "--prime", "3", "--digits", "3"]);
    assert_eq!(code, 3);
}

#[test]
fn coefficient_files() {
    let f = fixture("level2_weight8.json");
    let (code, out, _) = eigen(&["--level", "2", "--weight", "8", "--prime", "3", "--digits", "10", "--coeffs", &f]);
    assert_eq!(code, 0);
    assert!(out.contains("exact: 12"), "{out}");
    let f = fixture("level3_weight6.json");
    let (code, out, _) = eigen(&["--level", "3", "--weight", "6", "--prime", "7", "--digits", "10", "--coeffs", &f, "--z0", "0.1+0.7i"]);
    assert_eq!(code, 0);
    assert!(out.contains("exact: -40"), "{out}");
    let (code, _, _) = eigen(&["--level", "2", "--weight", "6", "--prime", "3", "--digits", "10", "--coeffs", &f]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"level": 2, "weight": 8, "coefficients": ["2", "1"]}"#).unwrap();
    let (code, _, err) = eigen(&["--level", "2", "--weight", "8", "--prime", "3", "--digits", "3", "--coeffs", bad.to_str().unwrap()]);
    assert_eq!(code, 6);
    assert!(err.contains("normalized"));
}

#[test]
fn qexp_subcommand() {
    let (code, out, _) = eigen(&["qexp", "--weight", "12", "--terms", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1\n-24\n252\n-1472\n4830\n");
    let (code, _, _) = eigen(&["qexp", "--weight", "14", "--terms", "5"]);
    assert_eq!(code, 3);
}

#[test]
fn bench_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let figs = dir.path().join("figs");
    let (code, out, _) = eigen(&[
        "bench",
        "--row",
        "1,12,101,direct",
        "--row",
        "1,12,101,eisenstein",
        "--csv",
        csv.to_str().unwrap(),
        "--figures",
        figs.to_str().unwrap(),
        "--figure-weight",
        "12",
        "--figure-max-prime",
        "30",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("1,12,101,direct,5,"));
    let res = std::fs::read_to_string(figs.join("residuals.csv")).unwrap();
    assert_eq!(res.lines().count(), 11);
    assert!(figs.join("truncation.csv").exists());
}

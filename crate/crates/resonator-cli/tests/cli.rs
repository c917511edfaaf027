//! Black-box tests of the `resonator` binary: exit codes, config
//! precedence, output shapes, and resume behavior.

use std::path::Path;
use std::process::{Command, Output};

use resonator_cli::records::read_jsonl;

fn resonator(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resonator"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn validation_failures_exit_1() {
    // composite modulus
    let out = resonator(&["resonate", "--q", "15"]);
    assert_eq!(exit_code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).contains("prime"), "{}", stderr(&out));

    // sigma outside the window
    let out = resonator(&["constants", "--sigma", "0.4"]);
    assert_eq!(exit_code(&out), 1);

    // X at or past q
    let out = resonator(&["resonate", "--q", "101", "--x-override", "200"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("below q"), "{}", stderr(&out));

    // theta with negative cosine cannot produce a certified record
    let out = resonator(&["resonate", "--q", "101", "--theta", "3.14159"]);
    assert_eq!(exit_code(&out), 1);

    // scan needs an output path
    let out = resonator(&["scan", "--q-min", "17", "--q-max", "30", "--count", "all"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("out"), "{}", stderr(&out));

    // unknown flags are validation errors too
    let out = resonator(&["resonate", "--q", "17", "--frobnicate"]);
    assert_eq!(exit_code(&out), 1);

    // q below the record floor
    let out = resonator(&["resonate", "--q", "13"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn help_and_version_exit_0() {
    let out = resonator(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("constants"));
    let out = resonator(&["--version"]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn constants_prints_parseable_json() {
    let out = resonator(&["constants", "--sigma", "0.75"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let json_line = text.lines().last().expect("output");
    let v: serde_json::Value = serde_json::from_str(json_line).expect("last line is JSON");
    for key in [
        "sigma",
        "theta",
        "epsilon",
        "grh",
        "lambda",
        "vartheta",
        "a_max_uncond",
        "a_max_grh",
        "a_used",
        "c_theorem_cap",
        "c_achieved",
        "asymptotic_terms_dropped",
    ] {
        assert!(v.get(key).is_some(), "missing key {key} in {json_line}");
    }
    assert_eq!(v["asymptotic_terms_dropped"], serde_json::json!(true));
    // the aligned text block repeats the same values
    assert!(text.contains("a_used"));

    // a quarter turn kills both constants (cos(pi/2) at f64 resolution)
    let out = resonator(&["constants", "--sigma", "0.75", "--theta", "1.5707963267948966"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let v: serde_json::Value =
        serde_json::from_str(text.lines().last().unwrap()).expect("JSON");
    assert!(v["c_theorem_cap"].as_f64().unwrap().abs() <= 1e-15);
    assert!(v["c_achieved"].as_f64().unwrap().abs() <= 1e-15);

    // GRH widens the admissible scale
    let out = resonator(&["constants", "--sigma", "0.75", "--grh"]);
    let text = stdout(&out);
    let v: serde_json::Value =
        serde_json::from_str(text.lines().last().unwrap()).expect("JSON");
    assert!(v["a_used"].as_f64().unwrap() > 0.9);
}

#[test]
fn chars_emits_full_csv_table() {
    let out = resonator(&["chars", "--q", "7"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,n,re,im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6 * 6, "m * (q-1) rows");
    // principal character row: chi_0(n) = 1 for all n coprime to q
    for row in rows.iter().take(6) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0], "0");
        assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 0.0);
    }
    // |chi(n)| = 1 on every row
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        let re: f64 = fields[2].parse().unwrap();
        let im: f64 = fields[3].parse().unwrap();
        assert!((re.hypot(im) - 1.0).abs() <= 1e-12, "row {row}");
    }

    // oversized q is refused, composite q is refused
    assert_eq!(exit_code(&resonator(&["chars", "--q", "1031"])), 1);
    assert_eq!(exit_code(&resonator(&["chars", "--q", "9"])), 1);

    // --out writes the same table to a file
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chars.csv");
    let out = resonator(&["chars", "--q", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn resonate_prints_record_and_appends() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let args = [
        "resonate",
        "--q",
        "101",
        "--y-cap",
        "20000",
        "--out",
        path.to_str().unwrap(),
    ];
    let out = resonator(&args);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).expect("record JSON");
    assert_eq!(v["q"], serde_json::json!(101));
    assert_eq!(v["schema_version"], serde_json::json!(1));

    // resonate appends unconditionally (resume is a scan concern)
    let out = resonator(&args);
    assert_eq!(exit_code(&out), 0);
    let records = read_jsonl(&path).expect("readable records");
    assert_eq!(records.len(), 2);
    // identical runs agree on everything except wall-clock time
    let (mut a, mut b) = (records[0], records[1]);
    a.runtime_ms = 0;
    b.runtime_ms = 0;
    assert_eq!(a, b);
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn config_file_layers_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(
        dir.path(),
        "# comment line\nsigma_list = 0.6\ntheta_list = 0.0\ny_cap = 20000 # trailing comment\n",
    );

    // file overrides the 0.75 default
    let out = resonator(&[
        "resonate",
        "--q",
        "101",
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["sigma"], serde_json::json!(0.6));
    assert_eq!(v["y"], serde_json::json!(20000.0));

    // flags override the file
    let out = resonator(&[
        "resonate",
        "--q",
        "101",
        "--config",
        conf.to_str().unwrap(),
        "--sigma",
        "0.75",
    ]);
    assert_eq!(exit_code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["sigma"], serde_json::json!(0.75));

    // malformed file lines are validation errors naming the line
    let bad = write_config(dir.path(), "sigma_list = 0.6\nnot a pair\n");
    let out = resonator(&["resonate", "--q", "101", "--config", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    // unknown keys are rejected
    let bad = write_config(dir.path(), "sigma = 0.6\n");
    let out = resonator(&["resonate", "--q", "101", "--config", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("unknown"), "{}", stderr(&out));

    // missing config file is an I/O failure
    let out = resonator(&["resonate", "--q", "101", "--config", "/nonexistent.conf"]);
    assert_eq!(exit_code(&out), 3, "{}", stderr(&out));
}

#[test]
fn scan_resumes_and_rejects_corrupt_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.jsonl");
    let args = [
        "scan",
        "--q-min",
        "17",
        "--q-max",
        "60",
        "--count",
        "all",
        "--y-cap",
        "20000",
        "--out",
        path.to_str().unwrap(),
    ];
    let out = resonator(&args);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("11 written"), "{}", stdout(&out));
    let full = std::fs::read_to_string(&path).unwrap();
    assert_eq!(full.lines().count(), 11);

    // rerun: everything already recorded
    let out = resonator(&args);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("0 written"), "{}", stdout(&out));
    assert!(stdout(&out).contains("11 skipped"), "{}", stdout(&out));

    // summary exists next to the records
    let summary = dir.path().join("scan.summary.csv");
    let summary_text = std::fs::read_to_string(&summary).unwrap();
    assert_eq!(summary_text.lines().count(), 12);

    // a corrupted line aborts with exit 3 and the 1-based line number
    std::fs::write(&path, format!("{full}{{\"not\": \"a record\"}}\n")).unwrap();
    let out = resonator(&args);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("line 12"), "{}", stderr(&out));
}

#[test]
fn verify_quick_passes() {
    let out = resonator(&["verify", "--level", "quick"]);
    assert_eq!(exit_code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS roots-table"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.lines().last().unwrap().contains("0 failed"), "{text}");
}

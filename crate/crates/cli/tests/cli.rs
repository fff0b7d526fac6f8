use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use isrs_nli::report::DeviationReport;

const SCENARIO: &str = r#"{
  "name": "cli",
  "fiber": {
    "alpha_db_per_km": 0.2, "gamma_per_w_per_km": 1.2,
    "dispersion_ps_per_nm_km": 18.0, "slope_ps_per_nm2_km": 0.067,
    "cr_per_w_per_km_per_thz": 0.0236, "ref_wavelength_nm": 1570.0
  },
  "plan": { "grid": { "count": 5, "symbol_rate_gbaud": 50.0, "power_per_channel_dbm": 2.0 } },
  "link": { "n_spans": 2, "span_length_km": 60.0 },
  "ssfm": { "symbols": 64, "oversampling": 16, "realizations": 1 },
  "models": ["isrs-gn-general", "eff-attn-cf", "isrs-gn-cf"]
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isrs-nli"))
}

fn setup(text: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    fs::write(&path, text).unwrap();
    (dir, path)
}

fn run(args: &[&str], scenario: &Path, out: &Path) -> Output {
    bin().args(args).arg("--scenario").arg(scenario).arg("--out").arg(out).output().unwrap()
}

fn schema_check(summary: &Path) -> DeviationReport {
    let schema_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/summary.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&fs::read_to_string(schema_path).unwrap()).unwrap();
    let text = fs::read_to_string(summary).unwrap();
    let instance: serde_json::Value = serde_json::from_str(&text).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    let report = DeviationReport::from_json(&text).unwrap();
    // and back to the same bytes
    assert_eq!(report.to_json().unwrap(), text);
    report
}

#[test]
fn compare_writes_tables_and_a_valid_summary() {
    let (dir, scenario) = setup(SCENARIO);
    let out = dir.path().join("out");
    let o = run(&["compare"], &scenario, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = schema_check(&out.join("summary.json"));
    assert_eq!(report.reference.as_str(), "isrs-gn-general");
    let reference = report.summary_for(report.reference).unwrap();
    assert_eq!(reference.max_abs_deviation_db, 0.0);
    for s in &report.summary {
        assert!(s.max_abs_deviation_db >= s.mean_abs_deviation_db && s.mean_abs_deviation_db >= 0.0);
    }
    let eta = fs::read_to_string(out.join("eta.csv")).unwrap();
    assert!(eta.starts_with("model,channel,frequency_hz,eta_db,eta_per_w2,p_nli_w,error_per_w2\n"));
    assert_eq!(eta.lines().count(), 1 + 3 * 5);
    let dev = fs::read_to_string(out.join("deviation.csv")).unwrap();
    assert_eq!(dev.lines().count(), 1 + 3 * 5);
    assert!(String::from_utf8_lossy(&o.stdout).contains("reference: isrs-gn-general"));
}

#[test]
fn sweep_summary_is_valid_and_axis_increases() {
    let (dir, scenario) = setup(SCENARIO);
    let out = dir.path().join("out");
    let o = run(&["sweep", "--models", "isrs-gn-cf", "--powers-dbm", "-5,5,12"], &scenario, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = schema_check(&out.join("summary.json"));
    let axis: Vec<f64> = report.points.iter().map(|p| p.power_transfer_db.unwrap()).collect();
    assert!(axis.windows(2).all(|w| w[1] > w[0]), "{axis:?}");
    assert_eq!(report.points[0].channels, vec![0, 2, 4]);
}

#[test]
fn profile_eta_and_ssfm_outputs() {
    let (dir, scenario) = setup(SCENARIO);
    let out = dir.path().join("out");
    assert!(run(&["profile"], &scenario, &out).status.success());
    let profile = fs::read_to_string(out.join("profile.csv")).unwrap();
    assert!(profile.starts_with("z_m,"));
    assert!(run(&["eta", "--models", "isrs-gn-cf", "--channels", "1,3"], &scenario, &out).status.success());
    let eta = fs::read_to_string(out.join("eta.csv")).unwrap();
    assert_eq!(eta.lines().count(), 3);
    let o = run(&["ssfm", "--dump-field"], &scenario, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read(out.join("field.bin")).unwrap().starts_with(b"NLIFLD01"));
    assert_eq!(fs::read_to_string(out.join("ssfm.csv")).unwrap().lines().count(), 6);
}

#[test]
fn config_errors_exit_with_two() {
    let (dir, scenario) = setup(&SCENARIO.replace("alpha_db_per_km", "alpha_db"));
    let o = run(&["compare"], &scenario, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fiber.alpha_db"));

    let o = run(&["compare"], &dir.path().join("missing.json"), &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));

    let (dir, scenario) = setup(SCENARIO);
    let o = run(&["compare", "--models", "nope"], &scenario, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eta", "--channels", "9"], &scenario, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn model_failure_exits_with_three_and_keeps_the_partial_report() {
    // one sample per symbol cannot hold the band
    let (dir, scenario) = setup(&SCENARIO.replace("\"oversampling\": 16", "\"oversampling\": 1"));
    let out = dir.path().join("out");
    let o = run(&["compare", "--models", "isrs-gn-cf,ssfm"], &scenario, &out);
    assert_eq!(o.status.code(), Some(3));
    let report = schema_check(&out.join("summary.json"));
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].model.as_str(), "ssfm");
    assert!(report.summary_for(report.reference).is_some());
}

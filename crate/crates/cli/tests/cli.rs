use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dual-racah"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

const BASE: &str = r#""family": "R", "N": 5, "b": "10", "c": "1/2", "d": "2/5", "D": [1]"#;

fn suite<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["suites"].as_array().unwrap().iter().find(|s| s["name"] == name).unwrap()
}

#[test]
fn y_eta_without_ladder_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &format!(
            r#"{{{BASE}, "Y": ["0", "1"], "suites": ["base", "mi", "recurrence", "dual", "closure", "commute", "shape", "qlimit"]}}"#
        ),
    );
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let ladder = suite(&report, "ladder");
    assert_eq!(ladder["status"], "skipped");
    assert!(ladder["note"].as_str().unwrap().contains("Y(0) = 0"));
}

#[test]
fn y_eta_ladder_is_expected_degenerate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!(r#"{{{BASE}, "Y": ["0", "1"]}}"#));
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(suite(&report, "ladder")["status"], "expected-degenerate");
    let evidence = report["closure_evidence"].as_array().unwrap();
    assert_eq!(evidence.len(), 1);
    assert_eq!(evidence[0]["residual_zero"], true);
}

#[test]
fn malformed_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("q.json", r#"{"family": "qR", "N": 5, "b": "1/1280", "c": "3/5", "d": "3/7", "q": "3/0"}"#.to_string()),
        ("unknown.json", format!(r#"{{{BASE}, "extra": true}}"#)),
        ("negative.json", format!(r#"{{{BASE}, "Y": ["-1"]}}"#)),
        ("syntax.json", "{".to_string()),
    ] {
        let cfg = write_config(tmp.path(), name, &body);
        let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(&["verify", "--config", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let cfg = write_config(tmp.path(), "ok.json", &format!("{{{BASE}}}"));
    let out = run(&["tables", "--config", cfg.to_str().unwrap(), "--what", "nonsense"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn reports_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!(r#"{{{BASE}, "suites": ["recurrence", "closure", "shape"]}}"#));
    let a = run(&["verify", "--config", cfg.to_str().unwrap()]);
    let b = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn precision_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!(r#"{{{BASE}, "suites": ["shape"]}}"#));
    let out = run(&["verify", "--config", cfg.to_str().unwrap(), "--precision", "512"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["precision"], 512);
}

fn tables(cfg: &Path, what: &str, dir: &Path) {
    let out = run(&["tables", "--config", cfg.to_str().unwrap(), "--what", what, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_has_one_row_per_level() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!("{{{BASE}}}"));
    tables(&cfg, "spectrum", tmp.path());
    let rows = read_csv(&tmp.path().join("spectrum.csv"));
    assert_eq!(rows[0], ["n", "X(n)"]);
    assert_eq!(rows.len() - 1, 6);
    assert_eq!(rows[1][1], "0/1");
}

#[test]
fn undeformed_polys_have_unit_column_at_origin() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"family": "R", "N": 5, "b": "10", "c": "1/2", "d": "2/5"}"#);
    tables(&cfg, "polys", tmp.path());
    let rows = read_csv(&tmp.path().join("polys.csv"));
    assert_eq!(rows[0][0], "n/x");
    assert_eq!(rows.len() - 1, 6);
    assert!(rows[1..].iter().all(|r| r[1] == "1/1"));
    assert!(tmp.path().join("polys.json").exists());
}

#[test]
fn rnk_table_matches_first_racah_closed_form() {
    use dual_racah::exact::{parse_scalar, ratio, int};
    use dual_racah::params::{make_params, Family};
    use dual_racah::recurrence::closed_forms::closed_form_r;

    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!("{{{BASE}}}"));
    tables(&cfg, "rnk", tmp.path());
    let rows = read_csv(&tmp.path().join("rnk.csv"));
    assert_eq!(rows[0], ["n", "k", "r"]);
    let p = make_params(Family::R, 5, int(10), ratio(1, 2), ratio(2, 5), None).unwrap();
    let entries: Vec<(usize, i64, _)> = rows[1..]
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), parse_scalar(&r[2]).unwrap()))
        .collect();
    // X is fixed only up to a positive factor; take it from r_{0,1}.
    let (_, _, r01) = entries.iter().find(|(n, k, _)| (*n, *k) == (0, 1)).unwrap();
    let scale = r01 / closed_form_r("R:{1}/1", &p, 0, 1).unwrap();
    assert!(scale > int(0));
    assert!(entries.iter().all(|(_, k, _)| k.abs() <= 2));
    for (n, k, r) in &entries {
        assert_eq!(r, &(closed_form_r("R:{1}/1", &p, *n, *k).unwrap() * &scale), "r_({n},{k})");
    }
    let json: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("rnk.json")).unwrap()).unwrap();
    assert_eq!(json["L"], 2);
}

#[test]
fn hamiltonian_and_dual_tables_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", &format!("{{{BASE}}}"));
    tables(&cfg, "hamiltonian", tmp.path());
    tables(&cfg, "dual", tmp.path());
    let h: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("hamiltonian.json")).unwrap()).unwrap();
    assert_eq!(h["h_tilde"].as_array().unwrap().len(), 6);
    assert_eq!(h["h_sym"]["precision"], 256);
    let rows = read_csv(&tmp.path().join("dual.csv"));
    assert_eq!(rows[0][0], "x/n");
    assert_eq!(rows.len() - 1, 6);
    assert!(rows[1..].iter().all(|r| r[1] == "1/1"));
}

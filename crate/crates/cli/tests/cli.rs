use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SMALL: &[&str] = &["--genus", "2", "--times", "2", "--t-order", "3", "--x-order", "4"];

fn kdvtau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdvtau"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_cache<'a>(args: &[&'a str], dir: &'a Path) -> Vec<&'a str> {
    let mut v = args.to_vec();
    v.extend(["--cache-dir", dir.to_str().unwrap()]);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// CSV rows whose time exponents (columns `first..first + n`) all vanish,
/// as `(row, numerator/denominator)`.
fn time_free_rows(csv: &str, first: usize, n: usize) -> Vec<(Vec<String>, String)> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect::<Vec<_>>())
        .filter(|cols| cols[first..first + n].iter().all(|e| e == "0"))
        .map(|cols| {
            let k = cols.len();
            (cols.clone(), format!("{}/{}", cols[k - 2], cols[k - 1]))
        })
        .collect()
}

#[test]
fn verify_genus_two_matches() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify"];
    args.extend(with_cache(SMALL, dir.path()));
    let o = kdvtau(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "match");
    assert_eq!(report["genus"], 2);
    assert!(report["first_mismatch"].is_null());
    assert_eq!(report["truncation"]["gbgw"]["t_order"], 3);
    let keys = report["input_cache_keys"].as_object().unwrap();
    assert!(keys.contains_key("wk-jets-g1") && keys.contains_key("wk-jets-g2"));
}

#[test]
fn injected_fault_exits_one_with_monomial() {
    let mut args = vec!["verify", "--inject-fault", "rhs"];
    args.extend(SMALL);
    let o = kdvtau(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("first mismatch at T1"), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["status"], "mismatch");
    assert_eq!(report["first_mismatch"]["monomial"], "T1");
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify"];
    args.extend(with_cache(SMALL, dir.path()));
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_str(&stdout(o)).unwrap();
        v.as_object_mut().unwrap().remove("wall_time_ms");
        v
    };
    assert_eq!(strip(&kdvtau(&args)), strip(&kdvtau(&args)));
}

#[test]
fn wk_jets_genus_one_is_logarithmic() {
    let o = kdvtau(&["wk-jets", "--genus", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "# genus 1\nlog\t1/24\n");
}

#[test]
fn wk_jets_second_run_is_a_cache_hit_with_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.txt");
    let out_s = out.to_str().unwrap();
    let args = with_cache(&["wk-jets", "--genus", "2", "--out", out_s], dir.path());
    let first = kdvtau(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let bytes = std::fs::read(&out).unwrap();
    let summary: Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert_eq!(summary["cache_hit"], false);
    assert_eq!(summary["terms"], 3);
    assert_eq!(summary["lemma_residuals_zero"], serde_json::json!([true, true]));
    let second = kdvtau(&args);
    let summary: Value = serde_json::from_str(&stdout(&second)).unwrap();
    assert_eq!(summary["cache_hit"], true);
    assert_eq!(std::fs::read(&out).unwrap(), bytes);
    assert!(String::from_utf8(bytes).unwrap().contains("-2,0,0,1\t1/1152"));
}

#[test]
fn stale_cache_entries_are_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let args = with_cache(&["wk-jets", "--genus", "2"], dir.path());
    assert_eq!(kdvtau(&args).status.code(), Some(0));
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let stale = text.replacen(&format!("version={}", env!("CARGO_PKG_VERSION")), "version=0.0.0", 1);
        std::fs::write(&path, stale).unwrap();
    }
    let o = kdvtau(&args);
    let summary: Value = serde_json::from_str(&stderr(&o)).unwrap();
    assert_eq!(summary["cache_hit"], false);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["wk-jets", "--genus", "0"],
        vec!["series", "nosuch"],
        vec!["verify", "--no-such-flag"],
        vec!["verify", "--genus", "3", "--wk-times", "4"],
        vec!["series", "F3", "--genus", "2"],
    ] {
        let o = kdvtau(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = kdvtau(&["series", "nosuch"]);
    assert!(stderr(&o).contains("valid names"));
}

#[test]
fn series_q_at_times_zero() {
    let o = kdvtau(&["series", "Q", "--times", "1", "--t-order", "2", "--x-order", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.starts_with("X,T1,T3,hbar,log2,numerator,denominator\n"));
    let rows: Vec<_> = time_free_rows(&csv, 1, 2)
        .into_iter()
        .map(|(cols, c)| (cols[0].clone(), c))
        .collect();
    assert_eq!(rows, vec![("0".into(), "1/1".into()), ("1".into(), "-1/2".into())]);
}

#[test]
fn series_u_initial_data() {
    let o = kdvtau(&[
        "series", "U", "--provenance", "gbgw", "--genus", "1", "--times", "1", "--t-order", "2",
        "--x-order", "3", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // hbar^2/8 + x^2/4 with x = X - 2
    let mut rows: Vec<_> = time_free_rows(&stdout(&o), 1, 2)
        .into_iter()
        .map(|(cols, c)| (cols[0].clone(), cols[3].clone(), c))
        .collect();
    rows.sort();
    let expected = vec![
        ("0", "0", "1/1"),
        ("0", "2", "1/8"),
        ("1", "0", "-1/1"),
        ("2", "0", "1/4"),
    ];
    let expected: Vec<_> = expected
        .into_iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect();
    assert_eq!(rows, expected);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"genus": 1, "times": 2, "t_order": 3, "x_order": 4}"#).unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let o = kdvtau(&["verify", "--config", cfg_s, "--genus", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["genus"], 2);
    assert_eq!(report["truncation"]["gbgw"]["x_order"], 4);
    std::fs::write(&cfg, r#"{"genus": 1, "bogus": 3}"#).unwrap();
    assert_eq!(kdvtau(&["verify", "--config", cfg_s]).status.code(), Some(2));
}

#[test]
fn series_json_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let o = kdvtau(&[
        "series", "F0", "--provenance", "wk", "--genus", "1", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["provenance"], "wk");
    let terms = doc["terms"].as_array().unwrap();
    assert!(terms.contains(&serde_json::json!(["t0^3", "1/6"])));
}

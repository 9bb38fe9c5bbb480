use std::process::{Command, Output};

use fqcount_core::verify::{place_count_literal, test_l_polynomials};
use serde_json::Value;

fn fqcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqcount")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn values(v: &Value) -> Vec<String> {
    v["values"].as_object().unwrap().values().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn count_sums_of_squares_q3() {
    let out = fqcount(&["count", "landau", "--q", "3", "--max-n", "5", "--oracle"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(values(&v), ["1", "2", "5", "12", "32", "84"]);
    assert!(v["oracle_match"].as_array().unwrap().iter().all(|m| m == &Value::Bool(true)));
}

#[test]
fn count_even_degree_half_degree_one() {
    let out = fqcount(&["count", "s2", "--q", "3", "--max-half-degree", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,degree,count,method,oracle_match");
    assert_eq!(lines[1].split(',').nth(2), Some("1"));
    assert_eq!(lines[2].split(',').take(3).collect::<Vec<_>>(), ["1", "2", "3"]);
}

#[test]
fn family_flag_matches_positional() {
    let a = fqcount(&["count", "s3", "--q", "5", "--max-half-degree", "4"]);
    let b = fqcount(&["count", "--family", "s3", "--q", "5", "--max-half-degree", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("fqcount-out-{}.json", std::process::id()));
    let out = fqcount(&["count", "landau", "--q", "5", "--max-n", "3", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(values(&v)[2], "12");
    std::fs::remove_file(path).ok();
}

#[test]
fn even_characteristic_is_refused() {
    let out = fqcount(&["count", "landau", "--q", "4", "--max-n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn oracle_column_stops_at_the_cap() {
    let v = json(&fqcount(&["count", "landau", "--q", "3", "--max-n", "6", "--oracle", "--cap", "30"]));
    let col = v["oracle_match"].as_array().unwrap();
    assert_eq!(col[0], Value::Bool(true));
    assert_eq!(col[6], Value::Null);
}

#[test]
fn resource_cap_exit_code() {
    let out = fqcount(&["count", "landau", "--q", "3", "--max-n", "3", "--oracle", "--cap", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert_eq!(fqcount(&["verify", "--suite", "oracle", "--cap", "10"]).status.code(), Some(3));
}

#[test]
fn progression_with_trivial_unit_group_is_refused() {
    let out = fqcount(&["estimate", "arith", "--q", "2", "--m", "T", "--a", "1", "--n", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c1 = 1"));
}

#[test]
fn estimate_below_threshold_is_flagged() {
    let v = json(&fqcount(&["estimate", "landau", "--q", "3", "--n", "2"]));
    assert_eq!(v["in_range"], Value::Bool(false));
    assert_eq!(v["threshold"], 149);
    assert_eq!(v["exact"], "5");
}

#[test]
fn estimate_at_200_is_inside_the_corollary_bound() {
    let v = json(&fqcount(&["estimate", "landau", "--q", "3", "--n", "200", "--digits", "20"]));
    assert_eq!(v["in_range"], Value::Bool(true));
    assert_eq!(v["within_corollary_bound"], Value::Bool(true));
    assert!(v["main_term"].as_str().unwrap().starts_with("1.3202707872"));
}

#[test]
fn constants_agree() {
    let v = json(&fqcount(&["constants", "kq", "--q", "3", "--digits", "15"]));
    assert!(v["methods"].as_array().unwrap().len() >= 2);
    assert_eq!(v["methods_agree"], Value::Bool(true));
    assert!(v["consensus"].as_str().unwrap().starts_with("1.32027078722979"));

    let v = json(&fqcount(&["constants", "cq", "--q", "3"]));
    assert!(v["consensus"].as_str().unwrap().starts_with("2.2531665060998"));
    assert!(v["methods"][0]["tail_bound"].is_string());

    let v = json(&fqcount(&["constants", "cam", "--q", "3", "--m", "T", "--a", "1", "--digits", "15"]));
    assert!(v["consensus"].as_str().unwrap().starts_with("7.5742037896499"));
}

#[test]
fn verify_identities_is_deterministic() {
    let a = fqcount(&["verify", "--suite", "identities", "--seed", "11"]);
    let b = fqcount(&["verify", "--suite", "identities", "--seed", "11"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout).ends_with("failed: pass\n"));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(fqcount(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

/// The per-degree place-count bound read literally. It is false for the
/// genus-1 test curves; the acceptance run reports it as FAIL.
#[test]
#[ignore]
fn place_count_per_degree_literal() {
    for l in test_l_polynomials().unwrap() {
        assert_eq!(place_count_literal(&l, 12).unwrap(), None, "q={} genus={}", l.q(), l.genus());
    }
}

use std::process::{Command, Output};

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gwt(cfg: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwt")).env("GWT_CONFIG", config(cfg)).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn antinormal_to_normal_contraction() {
    let o = gwt("single_mode.json", &["--format", "json", "contract", "--from", "A", "--to", "N"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["symbols"], serde_json::json!(["a", "a†"]));
    assert_eq!(v["entries"][0][1], "1");
}

#[test]
fn reorders_antinormal_product() {
    let o = gwt("single_mode.json", &["reorder", "--from", "antinormal", "--to", "normal", "a*a†"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "a†*a + 1");
}

#[test]
fn fermionic_sweep_passes() {
    let o = gwt("fermionic_timed.json", &["verify", "--max-len", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("T/N"));
}

#[test]
fn verify_streams_json_lines() {
    let o = gwt("single_mode.json", &["--format", "json", "verify", "--max-len", "2"]);
    assert!(o.status.success());
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.iter().filter(|v| v.get("summary").is_some()).count(), 3);
    assert!(lines.iter().filter(|v| v.get("word").is_some()).all(|v| v["pass"] == true));
}

#[test]
fn syntax_errors_are_structured() {
    let o = gwt("single_mode.json", &["--format", "json", "reorder", "--from", "A", "--to", "N", "a*(a†"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"]["kind"], "SyntaxError");
    assert_eq!(v["error"]["position"], 5);
}

#[test]
fn unknown_symbol_is_reported() {
    let o = gwt("single_mode.json", &["--format", "json", "reorder", "--from", "A", "--to", "N", "b"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("UnknownSymbol"));
}

#[test]
fn numeric_commutator() {
    let o = gwt("quadratures.json", &["--format", "json", "numeric", "--trunc", "12", "--block", "6", "q*p - p*q", "i"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["max_abs_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn quadratic_prefactor() {
    let dir = std::env::temp_dir().join(format!("gwt-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let d = dir.join("d.json");
    std::fs::write(&d, "[[0.8, 0], [0, 0.5]]").unwrap();
    let o = gwt("quadratures.json", &["--format", "json", "quadratic", d.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let pre: f64 = v["prefactor"].as_str().unwrap().parse().unwrap();
    assert!((pre - 1.0 / 0.55f64.sqrt()).abs() < 1e-12);
}

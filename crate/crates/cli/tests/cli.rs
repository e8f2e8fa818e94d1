use std::process::{Command, Output};

use serde_json::Value;

fn gl3gps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl3gps"))
        .args(args)
        .env_remove("GL3GPS_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = gl3gps(&all);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn whittaker_table_has_one_row_per_weight() {
    let o = gl3gps(&["whittaker", "--d", "2", "--r", "0.3", "--y1", "1", "--y2", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m_prime,re,im");
    assert_eq!(lines.len(), 6);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0], "-2");
    // seventeen significant digits
    assert_eq!(first[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
}

#[test]
fn whittaker_single_entry_and_range() {
    let v = json(&["whittaker", "--d", "3", "--mprime", "-1"]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    assert_eq!(v["rows"][0]["m_prime"], -1);
    let o = gl3gps(&["whittaker", "--mprime", "7", "--d", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mprime out of range"));
}

#[test]
fn stade_check_defaults_pass() {
    let v = json(&["stade-check"]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"][0]["oracle"], "elementary");
    assert_eq!(v["rows"][0]["status"], "pass");
}

#[test]
fn stade_check_rejects_t_outside_strip() {
    let o = gl3gps(&["stade-check", "--t", "0.9", "--oracle", "elementary"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("t outside (0,2/3)"));
}

#[test]
fn long_element_kernel_vanishes_on_positive_orthant() {
    let v = json(&["kernel", "--tag", "wl", "--eps", "++", "--y1", "0.7", "--y2", "1.3"]);
    assert_eq!(v["rows"][0]["re"].as_f64(), Some(0.0));
    assert_eq!(v["rows"][0]["im"].as_f64(), Some(0.0));
}

#[test]
fn kernel_methods_agree() {
    let v = json(&["kernel", "--tag", "w4", "--eps", "+-", "--method", "both"]);
    assert!(v["difference"].as_f64().unwrap() < 1e-8);
}

#[test]
fn kloosterman_verification() {
    let o = gl3gps(&["kloosterman", "--verify", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fast==bruteforce: OK (3072 cases)"));
}

#[test]
fn kloosterman_single_sum() {
    let v = json(&["kloosterman", "--tag", "wl", "--m", "1,1", "--n", "1,1", "--c", "5,5", "--check"]);
    assert!((v["re"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert_eq!(v["terms"], 36);
    assert_eq!(v["status"], "pass");
    // the w4 cell is empty unless c2 divides c1
    let v = json(&["kloosterman", "--tag", "w4", "--m", "-1,2", "--n", "1,1", "--c", "1,2"]);
    assert_eq!(v["terms"], 0);
}

#[test]
fn weyl_reports_main_term() {
    let v = json(&["weyl", "--window", "1,2", "--d", "3", "--scale", "30"]);
    let main = v["main_term"].as_f64().unwrap();
    assert!(main > 0.0);
    assert!((main - v["quadrature"].as_f64().unwrap()).abs() < 1e-10 * main);
    let o = gl3gps(&["weyl", "--d", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identity_sweep() {
    let v = json(&["identities", "--sweep", "3", "--seed", "5", "--tol", "1e-9"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn output_is_deterministic() {
    let args = ["whittaker", "--d", "3", "--r", "0.45", "--y1", "0.3", "--y2", "0.2", "--format", "json"];
    assert_eq!(stdout(&gl3gps(&args)), stdout(&gl3gps(&args)));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(gl3gps(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gl3gps(&["whittaker", "--tol", "0.5"]).status.code(), Some(2));
    assert_eq!(gl3gps(&["kernel", "--tag", "w3"]).status.code(), Some(2));
}

#[test]
fn config_file_and_output_path() {
    let dir = std::env::temp_dir().join(format!("gl3gps-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out = dir.join("out.json");
    std::fs::write(&cfg, format!("# defaults\nformat = json\ntol = 1e-9\nout = {}\n", out.display())).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gl3gps"))
        .args(["stade-check"])
        .env("GL3GPS_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);

    std::fs::write(&cfg, "tol = 2\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gl3gps")).args(["stade-check"]).env("GL3GPS_CONFIG", &cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

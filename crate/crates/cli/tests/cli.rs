use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lane-emden"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn ground_state_writes_profile_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["ground-state", "--n", "4", "--p", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("v0=1.000000"));
    let csv = fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,U,dU,V,dV"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 5);
    assert!(first[1].starts_with("1.0000000000000000e0") || first[1].starts_with("9.99999"));
    let side = json(&dir.path().join("profile.json"));
    assert_eq!(side["tool"], "lane-emden");
    assert_eq!(side["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(side["config"]["p"], 3.0);
    assert!((side["result"]["v0"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    for f in ["phi1.csv", "phi2.csv", "pw1_slice.csv", "pw2_slice.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn rejected_parameters_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["ground-state", "--n", "4", "--p", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("border"), "{}", stderr(&o));
    let o = run(&["ground-state", "--n", "4", "--p", "1.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("condition (P)"));
    let o = run(&["verify", "--eps", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# run\np = 2.5\nb-mode = delta\ndelta = 0.01\n").unwrap();
    let out = dir.path().join("o");
    let o = bin()
        .args(["constants", "--config"])
        .arg(&cfg)
        .args(["--p", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rec = json(&out.join("constants.json"));
    assert_eq!(rec["config"]["p"], 3.0);
    assert_eq!(rec["config"]["b_mode"], "delta");
    assert_eq!(rec["result"]["constants"]["mode"]["mode"], "delta");
    let b1 = rec["result"]["constants"]["B1"].as_f64().unwrap();
    let limit = 8.0 * 2f64.sqrt() * std::f64::consts::PI.powi(2);
    assert!((b1 / limit - 1.0).abs() < 0.05);
    assert!(stdout(&o).contains("identity"));
}

#[test]
fn malformed_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "p = 3\nmesh_seed = 4\n").unwrap();
    let o = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mesh_seed"));
    assert!(!dir.path().join("verify_summary.json").exists());
}

#[test]
fn check_selection_emits_only_selected_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--checks", "lemc1,lemb8"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "verify_boundary_loss.json",
            "verify_phi_pairing.json",
            "verify_summary.json"
        ]
    );
    let rec = json(&dir.path().join("verify_boundary_loss.json"));
    assert_eq!(rec["result"]["verdict"], "PASS");
    assert!(rec["result"]["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == true));
    let sum = json(&dir.path().join("verify_summary.json"));
    assert_eq!(sum["result"]["overall"], "PASS");
    assert_eq!(
        sum["config"]["checks"],
        serde_json::json!(["boundary_loss", "phi_pairing"])
    );
}

#[test]
fn failing_check_sets_exit_code_one() {
    // Case (ii) cross terms decay more slowly than the 1.5-per-halving rule.
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["verify", "--p", "1.9", "--checks", "cross_terms"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL cross_terms"));
    let sum = json(&dir.path().join("verify_summary.json"));
    assert_eq!(sum["result"]["overall"], "FAIL");
}

#[test]
fn reduced_energy_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["reduced-energy", "--g-samples", "11"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let printed: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d = printed["d_star"].as_f64().unwrap();
    assert!((d - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-6);
    let csv = fs::read_to_string(dir.path().join("g_samples.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    assert_eq!(csv.lines().next(), Some("d,G"));
}

#[test]
fn report_requires_records() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path()).unwrap();
    let o = run(&["report", "--from-existing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--checks", "kernel,f_taylor"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["report", "--from-existing"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep = json(&dir.path().join("report.json"));
    assert_eq!(rep["result"]["overall"], "PASS");
    assert!(rep["result"]["records"]["verify_kernel"].is_object());
}

#[test]
fn usage_errors() {
    assert_eq!(
        bin().arg("--bogus").output().unwrap().status.code(),
        Some(2)
    );
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--checks", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

use std::fs;
use std::process::Command;

use willmore_lab::cli::{help_text, run};

fn golden(name: &str) -> String {
    fs::read_to_string(format!(
        "{}/tests/golden/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("willmore-lab")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn help_matches_golden() {
    assert_eq!(help_text(), golden("help.txt"));
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("help.txt"));
}

#[test]
fn analyze_matches_golden() {
    let (code, out, err) = call(&[
        "analyze",
        "--surface",
        "enneper",
        "--center",
        "3,0",
        "--radius",
        "1",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, golden("analyze_enneper.json"));
}

#[test]
fn scan_csv_matches_golden() {
    let args = [
        "epsreg-scan",
        "--surface",
        "enneper",
        "--center",
        "3,0",
        "--radius",
        "0.25,0.5,1",
        "--format",
        "csv",
    ];
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(out, golden("scan_enneper.csv"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "normalize",
        "--surface",
        "invert center=(0.5,0.2,1) of (enneper)",
        "--center",
        "0.3,0",
        "--radius",
        "0.5",
    ];
    let (a, b) = (call(&args), call(&args));
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.1).unwrap();
    assert!(
        v["result"]["achieved_hbar"].as_f64().unwrap() < 1e-10,
        "{v}"
    );
}

#[test]
fn syntax_errors_exit_with_two_and_a_position() {
    let (code, _, err) = call(&["analyze", "--surface", "sphere r="]);
    assert_eq!(code, 2);
    assert!(err.contains("position"), "{err}");
    let (code, _, _) = call(&["analyze", "--surface", "enneper", "--moebius", "dilate"]);
    assert_eq!(code, 2);
    let (code, _, _) = call(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn domain_errors_exit_with_one_and_json() {
    let (code, out, err) = call(&["gauss-bonnet", "--surface", "enneper"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(v["error"], "unsupported_closed_surface");
    assert!(v["message"].is_string());
}

#[test]
fn gauss_bonnet_passes_on_spheres() {
    let (code, out, err) = call(&[
        "gauss-bonnet",
        "--surface",
        "invert center=(0.5,1,3) of (sphere r=1)",
    ]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["report"]["defect"].as_f64().unwrap() < 1e-3);
}

#[test]
fn residual_gate_follows_tolerance() {
    let base = [
        "residuals",
        "--surface",
        "perturb amp=0.05 of (enneper)",
        "--center",
        "0.2,0.3",
        "--radius",
        "0.3",
    ];
    let (code, _, _) = call(&[&base[..], &["--tol", "1.9"]].concat());
    assert_eq!(code, 1);
    let good = [
        "residuals",
        "--surface",
        "invert center=(0.5,0.2,1) of (catenoid)",
        "--center",
        "0.2,0.3",
        "--radius",
        "0.3",
        "--tol",
        "1.9",
    ];
    let (code, out, err) = call(&good);
    assert_eq!(code, 0, "{out}{err}");
}

#[test]
fn config_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# defaults\nsurface = enneper\ncenter = 3,0\nradius = 0.5\n",
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, out, err) = call(&["analyze", "--config", cfg]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["radius"], 0.5);
    let (_, out, _) = call(&["analyze", "--config", cfg, "--radius", "1"]);
    assert_eq!(out, golden("analyze_enneper.json"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = call(&[
        "analyze",
        "--surface",
        "enneper",
        "--center",
        "3,0",
        "--radius",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(
        fs::read_to_string(path).unwrap(),
        golden("analyze_enneper.json")
    );
}

#[test]
fn desitter_dump_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("y.csv");
    let p = path.to_str().unwrap();
    let spec = "invert center=(0.5,0.2,1) of (catenoid)";
    let (code, _, err) = call(&[
        "desitter",
        "--surface",
        spec,
        "--center",
        "0.2,0.3",
        "--radius",
        "0.3",
        "--dump",
        p,
    ]);
    assert_eq!(code, 0, "{err}");
    let (code, out, err) = call(&["desitter", "--y-grid", p]);
    assert_eq!(code, 0, "{err}");
    assert!(!out.is_empty());
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_willmore-lab");
    let ok = Command::new(bin).args(["zoo"]).output().unwrap();
    assert!(ok.status.success());
    let bad = Command::new(bin)
        .args(["analyze", "--surface", "nonsense("])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let domain = Command::new(bin)
        .args(["gauss-bonnet", "--surface", "plane"])
        .output()
        .unwrap();
    assert_eq!(domain.status.code(), Some(1));
}

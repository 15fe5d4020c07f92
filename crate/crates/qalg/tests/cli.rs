use std::process::Command;

fn qalg(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qalg")).args(args).output().unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("qalg_cli_{}_{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn specfun_suite_passes_and_is_deterministic() {
    let a = qalg(&["verify", "specfun"]);
    let b = qalg(&["verify", "specfun"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["suite"], "specfun");
    assert_eq!(v["overall_pass"], true);
    for key in ["hbar", "eta", "eta_prime", "c", "trunc"] {
        assert!(v["params"].get(key).is_some());
    }
}

#[test]
fn unknown_suite_and_bad_constraint_are_usage_errors() {
    assert_eq!(qalg(&["verify", "nonsense"]).status.code(), Some(2));
    let o = qalg(&["verify", "rmatrix", "--c", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hbar*c"));
}

#[test]
fn failing_suite_exits_nonzero() {
    // the quantum determinant comes out as -Id, so evalrep fails
    let o = qalg(&["verify", "evalrep"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let q = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "qdet_identity").unwrap();
    assert_eq!(q["pass"], false);
}

#[test]
fn config_file_with_flag_override_and_csv() {
    let d = scratch("cfg");
    let cfg = d.join("run.cfg");
    std::fs::write(&cfg, "# rmatrix sweep\nhbar = 0.2\ngrid = -1:1:4\ntol.unitarity = 1e-9\n").unwrap();
    let json = d.join("r.json");
    let o = qalg(&["verify", "rmatrix", "--config", cfg.to_str().unwrap(), "--hbar", "0.25", "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["params"]["hbar"], 0.25);
    let u = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "unitarity").unwrap();
    assert_eq!(u["gate"], 1e-9);

    let out = d.join("csv");
    let o = qalg(&["verify", "rmatrix", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("rmatrix_unitarity.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,residual"));
    assert_eq!(lines.count(), 20);
}

#[test]
fn bad_config_line_is_reported() {
    let d = scratch("bad");
    let cfg = d.join("bad.cfg");
    std::fs::write(&cfg, "hbar = 0.3\nthis is not valid\n").unwrap();
    let o = qalg(&["verify", "rmatrix", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn specfun_eval_and_probe() {
    let o = qalg(&["specfun", "eval", "--fn", "gamma", "--args", "4"]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("6.0000000000000"));
    let o = qalg(&["probe", "ordering", "--hbar-range", "0.1:0.1:1", "--eta-range", "1:1:1"]);
    let text = String::from_utf8_lossy(&o.stdout).to_string();
    assert!(text.starts_with("hbar,eta,kind,sup_phi_hat"));
    assert!(text.contains("he,") && text.contains("divergent"));
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_airy-bounce"));
    cmd.env_remove("AIRY_BOUNCE_THREADS");
    cmd
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("airy-bounce-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn column(csv: &str, k: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn help_exits_cleanly() {
    let (code, out, _) = run(bin().arg("--help"));
    assert_eq!(code, 0);
    assert!(out.contains("pattern") && out.contains("sweep"));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let (code, _, _) = run(bin().arg("spectrum"));
    assert_eq!(code, 2);
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = scratch("typo.json", r#"{"wavepacket": {"sigma_vv": 0.05}}"#);
    let (code, out, err) = run(bin().arg("model").arg("--config").arg(&cfg));
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("sigma_vv"), "{err}");
}

#[test]
fn invalid_value_names_its_key() {
    let cfg = scratch("negative.json", r#"{"wavepacket": {"sigma_v_mps": -0.01}}"#);
    let (code, _, err) = run(bin().arg("model").arg("--config").arg(&cfg));
    assert_eq!(code, 2);
    assert!(err.contains("wavepacket.sigma_v_mps"), "{err}");
}

#[test]
fn malformed_json_reports_a_location() {
    let cfg = scratch("broken.json", "{\n  \"grid\": {\"n\": }\n}\n");
    let (code, _, err) = run(bin().arg("model").arg("--config").arg(&cfg));
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn too_few_fringes_is_a_model_validity_failure() {
    let cfg = scratch("narrow.json", r#"{"wavepacket": {"sigma_v_mps": 0.012}}"#);
    let (code, out, err) = run(bin().arg("model").arg("--config").arg(&cfg));
    assert_eq!(code, 4);
    assert!(out.is_empty());
    assert!(err.contains("model-validity"), "{err}");
}

#[test]
fn exact_column_is_normalized_over_a_wide_window() {
    let cfg = scratch(
        "wide.json",
        r#"{"grid": {"detector": {"z_min_m": -0.395, "z_max_m": -0.26, "n_points": 16384}}}"#,
    );
    let (code, out, _) = run(bin().arg("pattern").arg("--config").arg(&cfg));
    assert_eq!(code, 0);
    assert!(out.starts_with("Z_m,prob_density_exact,prob_density_farfield,prob_density_model\n"));
    let z = column(&out, 0);
    let exact = column(&out, 1);
    let h = z[1] - z[0];
    let total = h * (exact.iter().sum::<f64>() - 0.5 * (exact[0] + exact[exact.len() - 1]));
    assert!((total - 1.0).abs() < 1e-3, "exact mass {total}");
}

#[test]
fn momentum_table_has_three_columns() {
    let (code, out, _) = run(bin().arg("momentum"));
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("v1_mps,prob_density,prob_density_model"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 1000);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));
}

#[test]
fn output_is_independent_of_thread_count() {
    let one = run(bin().arg("pattern").arg("--threads").arg("1"));
    let many = run(bin().arg("pattern").env("AIRY_BOUNCE_THREADS", "4"));
    assert_eq!(one.0, 0);
    assert_eq!(one.1, many.1);
}

#[test]
fn out_flag_writes_the_file() {
    let path = std::env::temp_dir().join(format!("airy-bounce-model-{}.csv", std::process::id()));
    let (code, out, _) = run(bin().arg("model").arg("--out").arg(&path));
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 8193);
    let _ = std::fs::remove_file(path);
}

#[test]
fn fisher_report_is_json() {
    let (code, out, _) = run(bin().arg("fisher"));
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in ["i_z", "i_p", "i_s", "cr_relative", "n_events"] {
        assert!(v[key].as_f64().unwrap() > 0.0, "{key}");
    }
    assert!(v["numerics"]["delta_g_rel"].as_f64().is_some());
    assert!(v["numerics"]["grid_n"].as_u64().is_some());
}

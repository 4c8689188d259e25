//! End-to-end tests of the reftor binary: exit codes, report values, and
//! byte-level determinism.

use std::io::Write as _;
use std::process::{Command, Stdio};

use serde_json::Value;

fn reftor(args: &[&str], stdin: Option<&str>) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reftor"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn reftor");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .expect("stdin pipe")
            .write_all(text.as_bytes())
            .expect("write stdin");
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().expect("wait for reftor");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("stdout utf8"),
        String::from_utf8(out.stderr).expect("stderr utf8"),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON output")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn circle_roundtrip_reports_the_frozen_witness_value() {
    let (code, model, _) = reftor(&["generate", "circle", "--z", "2"], None);
    assert_eq!(code, 0);
    let (code, report, _) = reftor(&["torsion", "-", "--mode", "both"], Some(&model));
    assert_eq!(code, 0);
    let r = json(&report);

    let (re, im) = complex(&r["analytic"]["torsion"]);
    assert!(re.abs() < 1e-12 && (im + 1.0).abs() < 1e-12, "T != -i: {re}+{im}i");
    assert_eq!(r["analytic"]["ambiguity"], "exact");
    assert!(r["analytic"]["identity_residual"].as_f64().unwrap() < 1e-12);

    let (re, im) = complex(&r["comb"]["torsion"]);
    assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12, "tau != z-1");

    // Continuum closed form: T = 1 - z = -1.
    let (re, im) = complex(&r["continuum"]["torsion"]);
    assert!((re + 1.0).abs() < 1e-12 && im.abs() < 1e-12);

    assert!((r["ratio_modulus"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["theta"]["satisfies_ag1"], true);
    assert_eq!(r["theta"]["satisfies_ag2"], true);
}

#[test]
fn zero_mode_holonomy_exits_with_assumption_code() {
    let (_, model, _) = reftor(&["generate", "circle", "--z", "1"], None);
    let (code, _, err) = reftor(&["torsion", "-"], Some(&model));
    assert_eq!(code, 3);
    assert!(err.contains("Assumption"), "stderr: {err}");
}

#[test]
fn invalid_parameters_exit_with_usage_code() {
    let (code, _, err) = reftor(&["generate", "lens", "--p", "4", "--q", "2"], None);
    assert_eq!(code, 2);
    assert!(err.contains("lens parameters"), "stderr: {err}");

    let (code, _, _) = reftor(&["check", "nosuchsuite"], None);
    assert_eq!(code, 2);

    let (code, _, _) = reftor(
        &["torsion", "-", "--mode", "sideways"],
        Some(r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]}}"#),
    );
    assert_eq!(code, 2);

    let (code, _, _) = reftor(&["sweep", "--out", "yaml"], None);
    assert_eq!(code, 2);
}

#[test]
fn unknown_model_fields_are_rejected() {
    let model = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]}, "bogus": 1}"#;
    let (code, _, err) = reftor(&["torsion", "-"], Some(model));
    assert_eq!(code, 2);
    assert!(err.contains("model file rejected"), "stderr: {err}");
}

#[test]
fn sweep_is_deterministic_and_flags_the_zero_mode() {
    let (code, csv1, summary) = reftor(&["sweep", "--jobs", "1"], None);
    assert_eq!(code, 0);
    let (code, csv5, _) = reftor(&["sweep", "--jobs", "5"], None);
    assert_eq!(code, 0);
    assert_eq!(csv1, csv5, "output must not depend on --jobs");

    let lines: Vec<&str> = csv1.lines().collect();
    assert_eq!(lines.len(), 442, "header plus 21 x 21 rows");
    assert_eq!(
        lines[0],
        "re(param),im(param),re(T),im(T),T_RS,re(eta),im(eta),|ratio|,flags"
    );
    let flagged: Vec<&&str> = lines.iter().filter(|l| l.contains("!V")).collect();
    assert_eq!(flagged.len(), 1, "exactly the z = 1 point is flagged");
    assert!(flagged[0].starts_with("1.0000000000000000e0,0.0"));
    assert!(summary.contains("441 points, 1 flagged"), "summary: {summary}");
}

#[test]
fn arc_sweep_passes_its_modulus_assertion() {
    let (code, csv, summary) = reftor(&["sweep", "--arc", "--angular", "12"], None);
    assert_eq!(code, 0, "summary: {summary}");
    assert_eq!(csv.lines().count(), 13);
}

#[test]
fn check_identity_passes_at_the_documented_tolerance() {
    let (code, out, _) = reftor(
        &["check", "identity", "--trials", "25", "--seed", "7"],
        None,
    );
    assert_eq!(code, 0);
    assert!(out.contains("25/25"), "stdout: {out}");
}

#[test]
fn euler_lift_scales_the_combinatorial_torsion() {
    let base = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]}}"#;
    let (_, report, _) = reftor(&["torsion", "-", "--mode", "comb"], Some(base));
    let tau0 = complex(&json(&report)["comb"]["torsion"]);

    // Lifting the 1-cell by t multiplies the torsion by z^(-1) = 1/2.
    let lifted = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]},
        "euler": {"lifts": {"v": "1", "e": "t"}, "orientation_sign": 1}}"#;
    let (code, report, _) = reftor(&["torsion", "-", "--mode", "comb"], Some(lifted));
    assert_eq!(code, 0);
    let tau1 = complex(&json(&report)["comb"]["torsion"]);
    assert!((tau1.0 - tau0.0 / 2.0).abs() < 1e-12 && tau1.1.abs() < 1e-12);

    // A lift on a cell that does not exist is a validation error.
    let unknown = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]},
        "euler": {"lifts": {"v": "1", "nope": "t"}, "orientation_sign": 1}}"#;
    let (code, _, _) = reftor(&["torsion", "-", "--mode", "comb"], Some(unknown));
    assert_eq!(code, 2);
}

#[test]
fn explicit_theta_matches_the_automatic_angle() {
    let model = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]}}"#;
    let (_, auto_report, _) = reftor(&["torsion", "-"], Some(model));
    let (code, manual_report, _) =
        reftor(&["torsion", "-", "--theta", "-0.3"], Some(model));
    assert_eq!(code, 0);
    let auto = complex(&json(&auto_report)["analytic"]["graded_det"]);
    let manual = complex(&json(&manual_report)["analytic"]["graded_det"]);
    assert!((auto.0 - manual.0).abs() < 1e-12 && (auto.1 - manual.1).abs() < 1e-12);

    let (code, _, _) = reftor(&["torsion", "-", "--theta", "west"], Some(model));
    assert_eq!(code, 2);
}

#[test]
fn random_models_satisfy_the_identity_and_refuse_comb_mode() {
    let (code, model, _) = reftor(
        &[
            "generate", "random", "--top-degree", "3", "--dims", "2,4,4,2", "--seed", "5",
        ],
        None,
    );
    assert_eq!(code, 0);
    let (code, report, _) = reftor(&["torsion", "-"], Some(&model));
    assert_eq!(code, 0);
    let r = json(&report);
    assert!(r["analytic"]["identity_residual"].as_f64().unwrap() < 1e-10);
    assert!(r["retries"].as_u64().is_some());

    let (code, _, err) = reftor(&["torsion", "-", "--mode", "comb"], Some(&model));
    assert_eq!(code, 2);
    assert!(err.contains("cell data"), "stderr: {err}");
}

#[test]
fn l_integral_rotates_the_dim3_phase() {
    let (_, model, _) = reftor(
        &["generate", "lens", "--p", "5", "--q", "1", "--char", "1"],
        None,
    );
    let (_, r0, _) = reftor(&["torsion", "-", "--l-integral", "0"], Some(&model));
    let (code, r1, _) = reftor(&["torsion", "-", "--l-integral", "1"], Some(&model));
    assert_eq!(code, 0);
    let t0 = complex(&json(&r0)["analytic"]["torsion"]);
    let t1 = complex(&json(&r1)["analytic"]["torsion"]);
    // exp(i pi * rank/2 * 1) = i for rank 1: a quarter turn.
    assert!((t1.0 + t0.1).abs() < 1e-12 && (t1.1 - t0.0).abs() < 1e-12);
}

#[test]
fn generated_output_is_byte_identical_across_runs() {
    let args = [
        "generate", "random", "--top-degree", "1", "--dims", "3,3", "--seed", "11",
    ];
    let (_, first, _) = reftor(&args, None);
    let (_, second, _) = reftor(&args, None);
    assert_eq!(first, second);

    let model = r#"{"kind": "circle", "circle": {"z": [0.5, 0.5]}}"#;
    let (_, first, _) = reftor(&["torsion", "-", "--mode", "both"], Some(model));
    let (_, second, _) = reftor(&["torsion", "-", "--mode", "both"], Some(model));
    assert_eq!(first, second);
}

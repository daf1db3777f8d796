use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fal(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fal"));
    cmd.args(args).env_remove("FAL_THREADS");
    if let Some(t) = threads {
        cmd.env("FAL_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write_residuals(path: &Path, r: impl Fn(f64) -> f64) {
    let mut s = String::from("t,re_num,im_num,re_pred,im_pred,residual\n");
    for k in 8..=20 {
        let t = 2f64.powi(-k);
        s += &format!("{t:.16e},0,0,0,0,{:.16e}\n", r(t));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn verify_floor_linear() {
    let o = fal(&["verify", "--family", "floor", "--lambda", "1", "--t-min", "1e-6", "--t-max", "1e-2"], None);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("t,re_num,im_num,re_pred,im_pred,residual\n"));
    assert_eq!(text.lines().count(), 18);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ok"));
}

#[test]
fn verify_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |p: &Path| {
        vec![
            "verify".to_string(),
            "--family".into(),
            "floor".into(),
            "--lambda".into(),
            "0.5".into(),
            "--output".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let argv_a = args(&a);
    let argv_b = args(&b);
    let oa = fal(&argv_a.iter().map(String::as_str).collect::<Vec<_>>(), Some("1"));
    let ob = fal(&argv_b.iter().map(String::as_str).collect::<Vec<_>>(), Some("4"));
    assert_eq!((code(&oa), code(&ob)), (0, 0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn verify_json_report() {
    let o = fal(&["verify", "--family", "powerlog", "-a", "0.5", "--beta", "0.5", "--lambda", "1", "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "fal-1");
    assert_eq!(v["pass"], true);
    assert_eq!(v["expansion"]["alpha"], 2.0);
    assert_eq!(v["expansion"]["p_main"], 3.0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 17);
}

#[test]
fn verify_dedekind_linear_coefficient() {
    let o = fal(&["verify", "--family", "dedekind", "--t-min", "1e-5", "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let last = v["rows"].as_array().unwrap().last().unwrap().clone();
    let t = last["t"].as_f64().unwrap();
    let re = last["numeric"][0].as_f64().unwrap();
    let law = -std::f64::consts::PI / std::f64::consts::LN_2;
    assert!((re / t / law - 1.0).abs() < 1e-3);
}

#[test]
fn verify_reports_slope_failure() {
    // the linear next term beats the stated t^{1/2}|log t|^{−0.99} class
    let o = fal(&["verify", "--family", "powerlog", "-a", "1", "--beta", "2", "--t-min", "1e-5"], None);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAILED"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "--family", "floor", "--lambda", "1", "--t-min", "1e-2", "--t-max", "1e-3"],
        vec!["verify", "--family", "floor"],
        vec!["verify", "--family", "cosine"],
        vec!["verify", "--family", "powerlog", "-a", "1", "--beta", "0.2"],
        vec!["verify", "--family", "floor", "--lambda", "0.3"],
        vec!["verify", "--family", "floor", "--lambda", "1", "--points-per-decade", "0"],
        vec!["simulate"],
        vec!["simulate", "--iid", "--family", "estermann"],
        vec!["simulate", "--dedekind", "--Q", "5"],
        vec!["fit"],
        vec!["bogus"],
    ] {
        let o = fal(&args, None);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!String::from_utf8_lossy(&o.stderr).contains("internal error"));
    }
    assert_eq!(code(&fal(&["constants"], Some("zero"))), 2);
    assert_eq!(code(&fal(&["--help"], None)), 0);
}

#[test]
fn fit_exact_power_laws() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.csv");
    write_residuals(&p, |t| 3.0 * t * t);
    let o = fal(&["fit", p.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["alpha_fit"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!(v["p_fit"].as_f64().unwrap().abs() < 1e-6);

    write_residuals(&p, |t| 0.2 * t * t * t.ln().abs().powi(3));
    let o = fal(&["fit", p.to_str().unwrap(), "--p", "3", "--format", "json"], None);
    let v = json(&o);
    assert!((v["alpha_fit"].as_f64().unwrap() - 2.0).abs() < 0.05);
    assert!((v["p_fit"].as_f64().unwrap() - 3.0).abs() < 0.05);
    assert!((v["slope_at_fixed_p"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn fit_reads_verify_output() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("sweep.csv");
    let o = fal(&["verify", "--family", "floor", "--lambda", "1", "--output", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    let o = fal(&["fit", p.to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!((row[0] - 2.0).abs() < 0.15, "{text}");
}

#[test]
fn fit_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    fs::write(&p, "t,residual\n0.1,abc\n").unwrap();
    assert_eq!(code(&fal(&["fit", p.to_str().unwrap()], None)), 2);
    fs::write(&p, "t,residual\n0.1,-1\n0.01,2\n0.001,3\n").unwrap();
    assert_eq!(code(&fal(&["fit", p.to_str().unwrap()], None)), 2);
    let missing = dir.path().join("none.csv");
    assert_eq!(code(&fal(&["fit", missing.to_str().unwrap()], None)), 2);
}

#[test]
fn simulate_iid_samples() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let base = ["simulate", "--iid", "--family", "floor", "--lambda", "1", "--r", "5", "--N", "50000", "--t", "0.02", "--max-distance", "0.03"];
    let run = |p: &Path, threads: &str| {
        let mut args = base.to_vec();
        args.extend(["--output", p.to_str().unwrap()]);
        fal(&args, Some(threads))
    };
    let (oa, ob) = (run(&a, "1"), run(&b, "3"));
    assert_eq!((code(&oa), code(&ob)), (0, 0), "{}", String::from_utf8_lossy(&oa.stderr));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(stdout(&oa), stdout(&ob));
    assert_eq!(fs::read_to_string(&a).unwrap().lines().count(), 50_001);

    let o = fal(&["simulate", "--iid", "--r", "0", "--N", "100", "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["distance"], 0.0);
    assert_eq!(v["empirical"][0], 1.0);
}

#[test]
fn simulate_dedekind_small() {
    let o = fal(&["simulate", "--dedekind", "--Q", "200", "--max-distance", "0.15", "--format", "json"], None);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["samples"], 12_232);
    assert!((v["normalization"].as_f64().unwrap() - 6.0 / std::f64::consts::PI).abs() < 1e-14);
    let o = fal(&["simulate", "--dedekind", "--Q", "200", "--max-distance", "0.001"], None);
    assert_eq!(code(&o), 1);
}

#[test]
fn constants_table() {
    let o = fal(&["constants", "--format", "json"], Some("2"));
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "fal-1");
    let rows = v["constants"].as_array().unwrap();
    let get = |n: &str| rows.iter().find(|r| r["name"] == n).unwrap()["value"].as_f64().unwrap();
    assert!((get("telescoping_a") + 1.0).abs() < 1e-8);
    assert!((get("estermann_c_star") + 1.0 / (3.0 * std::f64::consts::LN_2)).abs() < 1e-15);
    assert!(rows.iter().all(|r| r["provenance"].is_string()));
    let text = stdout(&fal(&["constants"], None));
    assert!(text.starts_with("name,value,provenance\neuler_gamma,5.7721566490153287e-1,closed form\n"));
}

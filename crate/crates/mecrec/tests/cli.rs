use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mecrec(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mecrec"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn same_config_and_seed_give_byte_identical_files() {
    let (ta, tb) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["reconstruct", "--noise-sigma", "1e-4", "--seed", "9", "--out", "run"];
    assert!(mecrec(&args, ta.path()).status.success());
    assert!(mecrec(&args, tb.path()).status.success());
    let (a, b) = (read_dir_sorted(&ta.path().join("run")), read_dir_sorted(&tb.path().join("run")));
    assert!(a.len() >= 5);
    assert_eq!(a, b);
}

#[test]
fn csv_headers_and_precision() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mecrec(&["reconstruct", "--approach", "differential", "--cumulants", "oracle"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let diff = fs::read_to_string(tmp.path().join("out/differential_series.csv")).unwrap();
    assert_eq!(
        diff.lines().next().unwrap(),
        "t,lambda_q,lambda_p,lambda_combined,dqq,dpp,dqp,delta_qform,delta_pform"
    );
    let samples = fs::read_to_string(tmp.path().join("out/delta_samples.csv")).unwrap();
    assert_eq!(samples.lines().next().unwrap(), "t,value,in_trusted");
    let first = samples.lines().nth(2).unwrap();
    let t = first.split(',').next().unwrap();
    // d.dddddddddddddde±x: 15 significant digits.
    assert_eq!(t.split('e').next().unwrap().trim_start_matches('-').len(), 16, "{t}");

    assert!(mecrec(&["simulate", "--out", "sim"], tmp.path()).status.success());
    let traj = fs::read_to_string(tmp.path().join("sim/trajectory.csv")).unwrap();
    assert_eq!(traj.lines().next().unwrap(), "t,mean_q,mean_p,var_q,var_p,cov_qp");
    assert_eq!(traj.lines().count(), 242);

    assert!(mecrec(&["tomograms", "--t", "0.5", "--noise-sigma", "1e-3", "--out", "tom"], tmp.path()).status.success());
    let tom = fs::read_to_string(tmp.path().join("tom/tomograms.csv")).unwrap();
    assert_eq!(tom.lines().next().unwrap(), "mu,nu,x,value,sigma_noise");
    assert_eq!(tom.lines().count(), 11);
}

#[test]
fn flags_override_the_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"preset": "non-markovian", "bw_threshold": 1e-3, "cumulants": "oracle", "out": "from_file"}"#,
    )
    .unwrap();
    let out = mecrec(&["reconstruct", "--config", "cfg.json", "--bw-threshold", "1e-4"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(tmp.path().join("from_file/report.json")).unwrap();
    let r = mecrec::ReconReport::from_json(&report).unwrap();
    assert_eq!(r.config.bw_threshold, 1e-4);
    assert_eq!(r.config.preset, mecrec::config::PresetName::NonMarkovian);
    assert_eq!(r.curves[0].point_count, 63);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| mecrec(args, tmp.path()).status.code().unwrap();
    assert_eq!(code(&["reconstruct", "--tbar", "1", "--xi", "2"]), 2);
    assert_eq!(code(&["reconstruct", "--bw-threshold", "0.5"]), 2);
    assert_eq!(code(&["reconstruct", "--config", "missing.json"]), 2);
    assert_eq!(code(&["reconstruct", "--preset", "sideways"]), 2);
    assert_eq!(code(&["reconstruct", "--noise-sigma", "1e-4", "--theory-omega-c", "20"]), 4);
    assert_eq!(code(&["reconstruct", "--case", "2", "--approach", "differential", "--noise-sigma", "1e-3"]), 3);
    assert_eq!(code(&["reconstruct", "--noise-sigma", "1e-4"]), 0);
}

#[test]
fn replicate_paper_writes_four_plot_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mecrec(&["replicate-paper", "--out", "rep"], tmp.path());
    assert!(out.status.success());
    for k in 1..=4 {
        let dat = fs::read_to_string(tmp.path().join(format!("rep/fig{k}.dat"))).unwrap();
        // Two panels, each with a sample block and a curve block.
        assert_eq!(dat.matches("\n\n\n").count(), 4, "fig{k}");
    }
    let csv = fs::read_to_string(tmp.path().join("rep/replication.csv")).unwrap();
    assert_eq!(csv.lines().count(), 9);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("1a") && stdout.contains("4b"));
}

#[test]
fn check_alias_free_prints_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |args: &[&str]| -> serde_json::Value {
        let out = mecrec(args, tmp.path());
        assert!(out.status.success());
        serde_json::from_slice(&out.stdout).unwrap()
    };
    assert_eq!(run(&["check-alias-free", "--dist", "exponential", "--h", "0.5"])["alias_free"], true);
    assert_eq!(run(&["check-alias-free", "--dist", "gamma", "--h", "0.5"])["alias_free"], true);
    assert_eq!(run(&["check-alias-free", "--dist", "delta", "--h", "0.5"])["alias_free"], false);
    let g3 = run(&["check-alias-free", "--dist", "gamma", "--h", "1", "--k", "3"]);
    assert_eq!(g3["alias_free"], false);
    let w = g3["collision"]["omega_b"].as_f64().unwrap().abs();
    assert!((w - 3f64.sqrt() * 3.0).abs() < 1e-6);
}

use std::fs;
use std::process::Command;

use xfid_core::metrics::MetricsReport;
use xfid_core::verify::VerifySummary;

struct Run {
    code: i32,
    out: String,
    err: String,
}

/// In-process invocation.
fn xfid(args: &[&str]) -> Run {
    let argv: Vec<String> = std::iter::once("xfid").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = xfid_cli::run(&argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

const GAMMA1: [&str; 13] =
    ["--theta", "1.5708", "--phi", "0.7854", "--psi", "0", "--x", "0", "--y", "0.027778", "--nu", "3.14159", "--json"];

#[test]
fn analyze_rounded_reference_state() {
    let mut args = vec!["analyze"];
    args.extend(GAMMA1);
    let r = xfid(&args);
    assert_eq!(r.code, 0, "{}", r.err);
    let rep: MetricsReport = serde_json::from_str(&r.out).unwrap();
    assert!((rep.purity_oracle - 5.0 / 9.0).abs() < 1e-5);
    assert!((rep.concurrence_oracle - 1.0 / 3.0).abs() < 1e-5);
    assert!((rep.fidelity_oracle - 7.0 / 9.0).abs() < 1e-5);
    assert!((rep.uhlmann_oracle - 2.0 / 3.0).abs() < 1e-5);
    assert!(r.err.contains("theta"), "snapping is reported: {}", r.err);
    // The document round-trips through the report type.
    let again = serde_json::to_value(&rep).unwrap();
    assert_eq!(again, serde_json::from_str::<serde_json::Value>(&r.out).unwrap());
}

#[test]
fn degrees_match_radians() {
    let deg = xfid(&["analyze", "--theta", "90", "--phi", "45", "--psi", "0", "--y", "0.25", "--nu", "180", "--degrees", "--json"]);
    let rad = xfid(&["analyze", "--theta", "1.5707963267948966", "--phi", "0.7853981633974483", "--psi", "0", "--y", "0.25", "--nu", "3.141592653589793", "--json"]);
    assert_eq!(deg.code, 0, "{}", deg.err);
    let a: MetricsReport = serde_json::from_str(&deg.out).unwrap();
    let b: MetricsReport = serde_json::from_str(&rad.out).unwrap();
    assert!((a.fidelity_oracle - b.fidelity_oracle).abs() < 1e-12);
    assert!((a.fidelity_oracle - 1.0).abs() < 1e-12);
}

#[test]
fn classify_text_and_json() {
    let r = xfid(&["classify", "--theta", "0.3", "--phi", "0.2", "--psi", "0.1"]);
    assert_eq!((r.code, r.out.as_str()), (0, "rank 4\n"));
    let r = xfid(&["classify", "--theta", "1.5707963267948966", "--phi", "0.7853981633974483", "--psi", "0", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["rank"], 2);
}

#[test]
fn solve_rank2_third_kind() {
    let r = xfid(&["solve", "--relation", "rank2k3", "--purity", "0.6", "--concurrence", "0.2", "--aux", "0.001", "--json"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    let f = v["optimal_fidelity"].as_f64().unwrap();
    assert!((f - 0.6623).abs() < 5e-4);
    let chosen = &v["roots"][v["chosen_root"].as_u64().unwrap() as usize]["params"];
    assert!((chosen["theta"].as_f64().unwrap() - 0.5809).abs() < 1e-4);

    let text = xfid(&["solve", "--relation", "rank2k3", "--purity", "0.6", "--concurrence", "0.2", "--aux", "0.001"]);
    assert!(text.out.contains("fidelity") && text.out.contains('*'));
}

#[test]
fn solve_with_angles_in_degrees() {
    let rad = xfid(&["solve", "--relation", "rank3k1", "--purity", "0.6", "--concurrence", "0.2", "--phi", "0.7853981633974483", "--psi", "1.5707963267948966", "--json"]);
    let deg = xfid(&["solve", "--relation", "rank3k1", "--purity", "0.6", "--concurrence", "0.2", "--phi", "45", "--psi", "90", "--degrees", "--json"]);
    assert_eq!(rad.code, 0, "{}", rad.err);
    let a: serde_json::Value = serde_json::from_str(&rad.out).unwrap();
    let b: serde_json::Value = serde_json::from_str(&deg.out).unwrap();
    let (fa, fb) = (a["optimal_fidelity"].as_f64().unwrap(), b["optimal_fidelity"].as_f64().unwrap());
    assert!((fa - fb).abs() < 1e-12 && (fa - 0.6898).abs() < 5e-4);
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["solve", "--relation", "rank2k3", "--purity", "0.4", "--concurrence", "0.2", "--aux", "0.001"], 3),
        (&["solve", "--relation", "rank4_quartic", "--purity", "0.9", "--concurrence", "0.2", "--aux", "0", "--phi", "0.785", "--psi", "0.785"], 3),
        (&["solve", "--relation", "nope", "--purity", "0.6", "--concurrence", "0.2"], 2),
        (&["solve", "--relation", "rank2k3", "--purity", "0.6", "--concurrence", "0.2"], 2),
        (&["solve", "--relation", "rank3k1", "--purity", "0.6", "--concurrence", "0.2", "--phi", "1"], 2),
        (&["analyze", "--theta", "3", "--phi", "0", "--psi", "0"], 2),
        (&["analyze", "--theta", "0.5", "--phi", "0.5", "--psi", "0.5", "--x", "0.9"], 2),
        (&["analyze", "--theta", "0.5", "--phi", "0.5", "--psi", "0.5", "--csv"], 2),
        (&["analyze", "--theta", "0.5", "--phi", "0.5"], 2),
        (&["analyze", "--theta", "abc", "--phi", "0.5", "--psi", "0.5"], 2),
        (&["sweep", "--figure", "11"], 2),
        (&["sweep", "--figure", "2"], 3),
        (&["sweep", "--relation", "rank2k3", "--vary", "P", "--lo", "0.9", "--hi", "0.6", "--concurrence", "0.2", "--y", "0.01"], 2),
        (&["sweep", "--relation", "rank2k3", "--vary", "P", "--lo", "0.25", "--hi", "0.45", "--concurrence", "0.2", "--y", "0.01"], 3),
        (&["sweep", "--relation", "rank2k3", "--vary", "Q", "--lo", "0.5", "--hi", "0.6"], 2),
        (&["sweep"], 2),
        (&["verify", "--samples", "0"], 2),
        (&["--frobnicate"], 2),
        (&[], 2),
    ];
    for (args, want) in cases {
        let r = xfid(args);
        assert_eq!(r.code, *want, "{args:?}: {}", r.err);
        assert!(r.err.starts_with("error: ") || r.err.contains("\nerror: "), "{args:?}: {}", r.err);
    }
}

#[test]
fn empty_figure_explains_itself() {
    let r = xfid(&["sweep", "--figure", "2"]);
    assert!(r.err.contains("no valid state"), "{}", r.err);
}

#[test]
fn help_succeeds() {
    let r = xfid(&["--help"]);
    assert_eq!(r.code, 0);
    for sub in ["analyze", "classify", "solve", "sweep", "verify", "examples"] {
        assert!(r.out.contains(sub));
    }
}

#[test]
fn examples_all_pass() {
    let r = xfid(&["examples"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert_eq!(r.out.lines().count(), 14);
    assert!(r.out.lines().all(|l| l.starts_with("ok")));
    let j = xfid(&["examples", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&j.out).unwrap();
    assert!(v.as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_is_deterministic() {
    let a = xfid(&["verify", "--samples", "1", "--seed", "7", "--json"]);
    let b = xfid(&["verify", "--samples", "1", "--seed", "7", "--json"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
    let summary: VerifySummary = serde_json::from_str(&a.out).unwrap();
    assert!(summary.passed && summary.seed == 7 && summary.samples_per_rank == 1);
    assert_eq!(serde_json::to_value(&summary).unwrap(), serde_json::from_str::<serde_json::Value>(&a.out).unwrap());
    let text = xfid(&["verify", "--samples", "50"]);
    assert!(text.out.contains("PASS"));
}

#[test]
fn sweep_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let r = xfid(&["sweep", "--figure", "1", "--csv", "--out", path.to_str().unwrap()]);
        assert_eq!(r.code, 0, "{}", r.err);
        assert!(r.out.is_empty());
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.starts_with("P,fidelity,oracle_residual,skipped\n"));
    assert_eq!(text.lines().count(), 202);
}

#[test]
fn sweep_json_and_custom() {
    let r = xfid(&["sweep", "--figure", "10", "--points", "5", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["spec"]["relation"], "uhlmann_vs_e");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
    assert!(v["rows"][0]["uhlmann"].is_f64());

    let r = xfid(&["sweep", "--relation", "rank3k1", "--vary", "f", "--lo", "0", "--hi", "0.25", "--points", "6", "--e", "0", "--purity", "0.7", "--concurrence", "0.2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out.lines().next().unwrap(), "f,fidelity,oracle_residual,skipped");
    assert_eq!(r.out.lines().count(), 7);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("state.conf");
    fs::write(&cfg, "# gamma1 rounded\ntheta = 1.5708\nphi = 0.7854\npsi = 0\ny = 0.027778\nnu = 3.14159\njson = true\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let r = xfid(&["analyze", "--config", cfg]);
    assert_eq!(r.code, 0, "{}", r.err);
    let rep: MetricsReport = serde_json::from_str(&r.out).unwrap();
    assert!((rep.fidelity_oracle - 7.0 / 9.0).abs() < 1e-5);

    // A flag on the command line wins over the file.
    let r = xfid(&["--config", cfg, "analyze", "--nu", "0"]);
    let rep: MetricsReport = serde_json::from_str(&r.out).unwrap();
    assert!(rep.params.nu == 0.0);

    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "theta\n").unwrap();
    assert_eq!(xfid(&["analyze", "--config", bad.to_str().unwrap()]).code, 2);
    assert_eq!(xfid(&["analyze", "--config", "/nonexistent/x.conf"]).code, 2);
}

#[test]
fn binary_exit_status_and_streams() {
    let exe = env!("CARGO_BIN_EXE_xfid");
    let ok = Command::new(exe).args(["sweep", "--figure", "9", "--points", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().lines().count(), 4);
    assert!(String::from_utf8(ok.stderr).unwrap().contains("rank4_quartic"));
    let bad = Command::new(exe).args(["solve", "--relation", "rank2k3", "--purity", "0.3", "--concurrence", "0.1", "--aux", "0"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(3));
    assert!(bad.stdout.is_empty());
}

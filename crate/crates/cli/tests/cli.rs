use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmebound"))
}

fn model(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name).to_string_lossy().into()
}

fn run(args: &[&str], out: &Path) -> Output {
    let o = bin().args(args).arg("-o").arg(out).output().expect("spawn");
    if !o.status.success() {
        eprintln!("{}", String::from_utf8_lossy(&o.stderr));
    }
    o
}

fn json(p: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn order_below_denominator_degree_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["moments", "--network", &model("toggle.txt"), "-d", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sdpa_export_writes_two_files_per_target_and_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["moments", "--network", &model("schlogl_unimodal.txt"), "-d", "4..7", "--targets", "X, X^2, X^3", "--export-sdpa"], dir.path());
    assert!(o.status.success());
    let n = std::fs::read_dir(dir.path().join("exports")).unwrap().count();
    assert_eq!(n, 2 * 3 * 4);
    let m = json(dir.path().join("manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2 * 3 * 4);
}

#[test]
fn moments_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["moments", "--network", &model("schlogl_e3.txt"), "-d", "3,4", "--targets", "X"], dir.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let m = json(dir.path().join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["subcommand"], "moments");
    assert!(m["results"]["sdp"]["feas_tol"].as_f64().is_some());
}

#[test]
fn birth_death_is_routed_to_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["dist", "--network", &model("mm_inf.txt"), "--w", "X", "--c", "user:5", "-r", "50,100"];
    assert!(run(&args, &dir.path().join("bd")).status.success());
    assert_eq!(json(dir.path().join("bd/manifest.json"))["results"]["route"], "birth_death");
    let mut lp_args = args.to_vec();
    lp_args.push("--lp");
    assert!(run(&lp_args, &dir.path().join("lp")).status.success());
    assert_eq!(json(dir.path().join("lp/manifest.json"))["results"]["route"], "lp");
    // Both paths give the same per-state bounds.
    let read = |d: &str| -> Vec<(f64, f64)> {
        let s = std::fs::read_to_string(dir.path().join(d).join("dist_r100.csv")).unwrap();
        let header: Vec<&str> = s.lines().next().unwrap().split(',').collect();
        let (li, ui) = (header.iter().position(|h| *h == "lower").unwrap(), header.iter().position(|h| *h == "upper").unwrap());
        s.lines().skip(1).map(|l| l.split(',').collect::<Vec<_>>()).map(|f| (f[li].parse().unwrap(), f[ui].parse().unwrap())).collect()
    };
    let (a, b) = (read("bd"), read("lp"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x.0 - y.0).abs() < 1e-8 && (x.1 - y.1).abs() < 1e-8, "{x:?} vs {y:?}");
    }
}

#[test]
fn small_r_is_flagged_uninformative() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dist", "--network", &model("schlogl_unimodal.txt"), "--w", "X", "--c", "user:18", "-r", "10"], dir.path());
    assert!(o.status.success());
    let cert = json(dir.path().join("certificate.json"));
    assert_eq!(cert["certificates"][0]["uninformative"], true);
}

#[test]
fn r_list_must_increase() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dist", "--network", &model("mm_inf.txt"), "--c", "user:5", "-r", "100,50"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn broken_network_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    std::fs::write(&f, "0 -> X @ mass_action(-1)\n").unwrap();
    let o = run(&["drift", "--network", f.to_str().unwrap(), "--w", "X", "--k2", "1"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn simulation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["simulate", "--network", &model("toggle.txt"), "--t-end", "200", "--seed", "3", "--replicas", "3", "--log"];
    assert!(run(&args, &dir.path().join("a")).status.success());
    assert!(run(&args, &dir.path().join("b")).status.success());
    for f in ["histogram.csv", "trajectory.bin"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        assert_eq!(a, std::fs::read(dir.path().join("b").join(f)).unwrap(), "{f}");
        assert!(!a.is_empty());
    }
}

#[test]
fn toggle_drift_leading_negative() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["drift", "--network", &model("toggle.txt"), "--w", "(A+B)^3", "--k2", "3/2", "--radius", "25"], dir.path());
    assert!(o.status.success());
    let d = json(dir.path().join("drift.json"));
    assert_eq!(d["verdict"], "VerifiedOnBox+LeadingNegative");
    assert_eq!(d["box"]["states"], 26 * 26);
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, format!("network = \"{}\"\nw = X\nc = user:18\nr = 100,200\n", model("schlogl_unimodal.txt"))).unwrap();
    let a = bin().args(["--config", cfg.to_str().unwrap(), "dist", "-o"]).arg(dir.path().join("a")).output().unwrap();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&["dist", "--network", &model("schlogl_unimodal.txt"), "--w", "X", "--c", "user:18", "-r", "100,200"], &dir.path().join("b"));
    assert!(b.status.success());
    for f in ["dist_r100.csv", "dist_r200.csv", "certificate.json"] {
        assert_eq!(std::fs::read(dir.path().join("a").join(f)).unwrap(), std::fs::read(dir.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn parameter_sweep_fans_out() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dist", "--network", &model("mm_inf.txt"), "--c", "user:10", "-r", "200", "--sweep", "lambda=2,4"], dir.path());
    assert!(o.status.success());
    let m = json(dir.path().join("manifest.json"));
    assert_eq!(m["sweep"]["runs"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("sweep/lambda=4/certificate.json").exists());
    let unknown = run(&["dist", "--network", &model("mm_inf.txt"), "--c", "user:10", "-r", "200", "--sweep", "nope=1"], &dir.path().join("x"));
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn candidate_support_follows_parity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dist", "--network", &model("two_class.txt"), "--w", "A + B", "--c", "user:3", "-r", "60", "--candidate", "2,0"], dir.path());
    assert!(o.status.success());
    let s = std::fs::read_to_string(dir.path().join("candidate_r60.csv")).unwrap();
    for l in s.lines().skip(1) {
        let f: Vec<&str> = l.split(',').collect();
        let (a, p): (u32, f64) = (f[0].parse().unwrap(), f[2].parse().unwrap());
        if p > 1e-8 {
            assert_eq!(a % 2, 0, "{l}");
        }
    }
    let cert = json(dir.path().join("certificate.json"));
    assert_eq!(cert["certificates"][0]["uniqueness"]["verdict"], "inconclusive");
}

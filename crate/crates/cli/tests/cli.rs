use std::path::Path;
use std::process::{Command, Output};

fn pa_clt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pa-clt"))
        .args(args)
        .env_remove("PA_CLT_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn simulate_header_and_leaf_share() {
    let o = pa_clt(&["simulate", "--m", "1", "--delta", "0", "--steps", "100000", "--kmax", "5", "--seed", "7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,count,empirical_pmf,theoretical_pk"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    let pmf: f64 = first[2].parse().unwrap();
    assert!((pmf - 2.0 / 3.0).abs() < 0.01, "{pmf}");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn same_seed_same_bytes() {
    let args = ["simulate", "--m", "2", "--delta", "-1", "--steps", "5000", "--seed", "11"];
    let a = pa_clt(&args);
    let b = pa_clt(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = pa_clt(&["simulate", "--m", "2", "--delta", "-1", "--steps", "5000", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn covariance_ignores_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = pa_clt(&[
            "covariance", "--steps", "300", "--reps", "40", "--kmax", "4", "--seed", "5",
            "--workers", workers, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let one = run("1", "one");
    let three = run("3", "three");
    for suffix in ["_empirical.csv", "_theoretical.csv", "_summary.csv"] {
        let a = read(&one.with_file_name(format!("one{suffix}")));
        let b = read(&three.with_file_name(format!("three{suffix}")));
        assert_eq!(a, b, "{suffix}");
    }
    let summary = read(&one.with_file_name("one_summary.csv"));
    assert_eq!(summary.lines().next(), Some("r,l,empirical,theoretical,mc_stderr,rel_dev"));
    assert_eq!(summary.lines().count(), 1 + 16);
}

#[test]
fn covariance_theory_is_seed_free() {
    let column = |seed: &str| -> Vec<String> {
        let o = pa_clt(&["covariance", "--m", "2", "--delta", "1", "--steps", "200", "--reps", "10", "--kmax", "5", "--seed", seed]);
        assert!(o.status.success());
        stdout(&o).lines().skip(1).map(|l| l.split(',').nth(3).unwrap().to_string()).collect()
    };
    assert_eq!(column("1"), column("2"));
}

#[test]
fn covariance_needs_two_replications() {
    let o = pa_clt(&["covariance", "--reps", "1", "--steps", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient"));
}

#[test]
fn bad_parameters_are_rejected() {
    let o = pa_clt(&["simulate", "--m", "1", "--delta", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = pa_clt(&["figures", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn figure_one_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("f1");
    let o = pa_clt(&["figures", "1", "--kmax", "8", "--out", prefix.to_str().unwrap()]);
    assert!(o.status.success());
    let left = read(&dir.path().join("f1_left.csv"));
    let header: Vec<&str> = left.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 5);
    assert_eq!(left.lines().count(), 1 + 8);
    let right = read(&dir.path().join("f1_right.csv"));
    assert_eq!(right.lines().nth(1).unwrap().split(',').next(), Some("2"));
    let script = read(&dir.path().join("f1.gp"));
    assert!(script.contains("f1_left.csv") && script.contains("set logscale y"));
}

#[test]
fn config_file_sets_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# small run\nm = 3\ndelta = 2\nsteps = 400\nkmax = 6\n").unwrap();
    let o = pa_clt(&["simulate", "--config", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1).unwrap().split(',').next(), Some("3"));
    assert_eq!(text.lines().count(), 1 + 4);
    let o = pa_clt(&["simulate", "--config", path.to_str().unwrap(), "--kmax", "4"]);
    assert_eq!(stdout(&o).lines().count(), 1 + 2);
}

#[test]
fn verify_single_set_passes() {
    let o = pa_clt(&["verify", "--m", "2", "--delta", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("check,params,residual,status"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",pass") && l.contains("m=2;delta=0")));
}

#[test]
fn injected_fault_fails_verify() {
    let o = pa_clt(&["verify", "--m", "1", "--delta", "1", "--inject-fault", "rz-sign-flip"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("cross_path") && l.ends_with(",fail")));
}

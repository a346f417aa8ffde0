use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vqspde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vqspde")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
        .display()
        .to_string()
}

fn run(conf: &str, out: &Path, extra: &[&str]) -> Output {
    let conf = config(conf);
    let out = out.display().to_string();
    let mut args = vec!["run", conf.as_str(), "--out", out.as_str()];
    for s in extra {
        args.push("--set");
        args.push(s);
    }
    vqspde(&args)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn heat_benchmark_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("heat-benchmark.conf", dir.path(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = read(dir.path(), "trajectory.csv");
    assert!(traj.starts_with("step,time,theta0,trace_error,norm_error\n"));
    let trace = column(&traj, "trace_error");
    assert_eq!(trace.len(), 101);
    assert!(trace.iter().sum::<f64>() / trace.len() as f64 <= 0.05);
    // 17 significant digits.
    let first = traj.lines().nth(2).unwrap().split(',').nth(2).unwrap();
    assert_eq!(first.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);

    let profiles = read(dir.path(), "profiles.csv");
    assert_eq!(profiles.lines().next().unwrap().split(',').count(), 17);
    assert_eq!(profiles.lines().count(), 102);
    let params = read(dir.path(), "params.csv");
    assert_eq!(params.lines().count(), 1 + 17);

    let meta: serde_json::Value = serde_json::from_str(&read(dir.path(), "meta.json")).unwrap();
    assert_eq!(meta["config"]["experiment"], "heat-benchmark");
    // (16 + 1)(16/2 + 4) for the periodic term set.
    assert_eq!(meta["circuits"]["per_assembly"], 204.0);
    assert!(meta["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let extra = ["t_final=1e-3"];
    assert!(run("heat-benchmark-sampled.conf", a.path(), &extra).status.success());
    assert!(run("heat-benchmark-sampled.conf", b.path(), &extra).status.success());
    for f in ["trajectory.csv", "profiles.csv", "params.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f), "{f} differs");
    }
    let c = tempfile::tempdir().unwrap();
    assert!(run("heat-benchmark-sampled.conf", c.path(), &["t_final=1e-3", "seed=2"]).status.success());
    assert_ne!(read(a.path(), "params.csv"), read(c.path(), "params.csv"));
}

#[test]
fn manifest_reruns_to_same_outputs() {
    let a = tempfile::tempdir().unwrap();
    assert!(run("smoluchowski.conf", a.path(), &["t_final=2e-3"]).status.success());
    let b = tempfile::tempdir().unwrap();
    let manifest = a.path().join("meta.json").display().to_string();
    let out_b = b.path().display().to_string();
    let out = vqspde(&["run", &manifest, "--out", &out_b]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["trajectory.csv", "profiles.csv", "params.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
}

#[test]
fn dlvo_profiles_are_suppressed_near_wall() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("smoluchowski-dlvo-z10-k10.conf", dir.path(), &[]);
    assert!(out.status.success());
    let profiles = read(dir.path(), "profiles.csv");
    let last: Vec<f64> = profiles.lines().last().unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    for i in 0..4 {
        assert!(last[i] < last[i + 1], "{last:?}");
    }
}

#[test]
fn config_errors_exit_two_and_name_key() {
    let dir = tempfile::tempdir().unwrap();
    for (set, key) in [("dt=-1", "dt"), ("bc=sticky", "bc"), ("colour=red", "colour"), ("shots=0", "shots")] {
        let extra = if key == "shots" { vec!["backend=sampled", set] } else { vec![set] };
        let out = run("heat-benchmark.conf", dir.path(), &extra);
        assert_eq!(out.status.code(), Some(2), "{set}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(&format!("'{key}'")), "{set}");
    }
    let out = vqspde(&["run", "/nonexistent/config.conf"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn blow_up_exits_three_with_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("heat-benchmark.conf", dir.path(), &["dt=0.05", "t_final=100"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at step"));
}

#[test]
fn orbits_subcommand_lists_table() {
    let out = vqspde(&["orbits", "--n", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().filter(|l| l.trim_start().starts_with(char::is_numeric)).count(), 4);
    assert!(text.contains("reachable: 21 of 31"));
}

#[test]
fn encode_subcommand() {
    let out = vqspde(&["encode", "--n", "4", "--layers", "4", "--target", "10"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("layer 3 wire 3"));
    let out = vqspde(&["encode", "--n", "5", "--layers", "5", "--target", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn encode_table_experiment() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run("encode-table.conf", dir.path(), &[]).status.success());
    let table = read(dir.path(), "encode.csv");
    assert_eq!(table.lines().count(), 16);
    assert!(table.lines().skip(1).all(|l| !l.contains(",,")));
}

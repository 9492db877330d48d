//! End-to-end runs of the `bgk` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bgk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bgk"))
        .args(args)
        .output()
        .expect("bgk binary should start")
}

fn read_csv(path: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = bgk(&["run", "--nx", "8", "--nv", "24", "-k", "1", "--t-final", "0.01", "--out-dir", out]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let (header, rows) = read_csv(&dir.path().join("moments.csv"));
    assert_eq!(header, "x,n,u_x,u_y,T");
    assert_eq!(rows.len(), 16);
    let (header, rows) = read_csv(&dir.path().join("conservation.csv"));
    assert!(header.starts_with("step,time,dt,mass,momentum_x,momentum_y,energy"));
    let last_time: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert_eq!(last_time, 0.01);
    let (header, rows) = read_csv(&dir.path().join("ranks.csv"));
    assert_eq!(header, "x,rank");
    assert!(rows.iter().all(|r| r[1].parse::<usize>().unwrap() >= 1));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["problem"], "smooth");
    assert_eq!(summary["nx"], 8);
    assert!(summary["max_drift"].as_f64().unwrap() < 1e-5);
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let res = bgk(&[
            "run", "--problem", "sod", "--nx", "10", "--nv", "20", "-k", "1", "--limiter", "minmod",
            "--eps", "1e-4", "--t-final", "0.005", "--out-dir", dir.path().to_str().unwrap(),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    for file in ["moments.csv", "ranks.csv"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("case.cfg");
    fs::write(&cfg, "# standing shock\nproblem = standing_shock\nnx = 12\nnv = 24\nk = 1\nt_final = 0.002\n").unwrap();
    let out = dir.path().join("out");
    let res = bgk(&[
        "run", "--config", cfg.to_str().unwrap(), "--nx", "6", "--limiter", "minmod",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["problem"], "standing_shock");
    assert_eq!(summary["nx"], 6);
    assert_eq!(summary["limiter"], "minmod");
}

#[test]
fn converge_subcommand_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let res = bgk(&[
        "converge", "-k", "0", "--nv", "24", "--refinements", "8,16,32", "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&dir.path().join("convergence.csv"));
    assert_eq!(header, "nx,l1_error,order");
    assert_eq!(rows.len(), 2);
    let order: f64 = rows[1][2].parse().unwrap();
    assert!((order - 1.0).abs() < 0.2, "{order}");
}

#[test]
fn bench_and_conserve_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = bgk(&[
        "bench", "--nx", "4", "-k", "0", "--t-final", "0.005", "--nvs", "32,64", "--repeats", "1",
        "--out-dir", out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&dir.path().join("bench.csv"));
    assert_eq!(header, "nv,seconds");
    assert_eq!(rows.len(), 2);

    let res = bgk(&[
        "conserve", "--nx", "4", "--nv", "16", "-k", "1", "--t-final", "0.005", "--eps-values",
        "1,1e-6", "--tols", "1e-15", "--out-dir", out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let (header, rows) = read_csv(&dir.path().join("conserve.csv"));
    assert_eq!(header, "eps,tol,max_drift,max_rank");
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() < 1e-11));
}

#[test]
fn invalid_input_fails_with_a_json_error() {
    for args in [
        &["run", "--nx", "0"][..],
        &["run", "--problem", "vortex"],
        &["run", "--limiter", "superbee"],
        &["run", "--config", "/nonexistent/case.cfg"],
        &["converge", "--refinements", "16,24"],
    ] {
        let res = bgk(args);
        assert!(!res.status.success(), "{args:?}");
        let stderr = String::from_utf8_lossy(&res.stderr);
        let line = stderr.lines().last().unwrap();
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["error"].is_string(), "{args:?}: {line}");
    }
}

//! Drives the built binary end to end: generate -> build -> run/launch ->
//! merge -> report, checking truth conservation and that process/thread
//! splits never change merged results.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypertm"))
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().expect("spawn hypertm");
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(
        out.status.success(),
        "command failed: {:?}\nstdout:\n{}\nstderr:\n{}",
        cmd,
        stdout,
        stderr
    );
    stdout
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

struct Fixture {
    _dir: tempfile::TempDir,
    data: std::path::PathBuf,
    arch: std::path::PathBuf,
    root: std::path::PathBuf,
}

/// Small three-window corpus: 2^12 packets in 2^8-packet matrices, four
/// matrices per archive, 10-bit addresses.
fn fixture(extra_cfg: &[&str]) -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let data = root.join("data");
    let arch = root.join("arch");
    let mut gen = bin();
    gen.args([
        "generate",
        "--np-packets",
        "2^12",
        "--nv",
        "2^8",
        "--nmat-per-file",
        "2^2",
        "--log2-dim",
        "10",
        "--windows",
        "3",
        "--seed",
        "42",
    ]);
    gen.args(extra_cfg);
    gen.arg("--out").arg(&data);
    run_ok(&mut gen);
    run_ok(
        bin()
            .arg("build")
            .arg("--packets")
            .arg(&data)
            .arg("--out")
            .arg(&arch)
            .arg("--config")
            .arg(data.join("config.txt")),
    );
    Fixture {
        _dir: dir,
        data,
        arch,
        root,
    }
}

fn launch(fx: &Fixture, tag: &str, np: usize, dist: &str, threads: usize) -> std::path::PathBuf {
    let out = fx.root.join(tag);
    run_ok(
        bin()
            .arg("launch")
            .arg("--manifest")
            .arg(fx.arch.join("manifest.tsv"))
            .arg("--config")
            .arg(fx.data.join("config.txt"))
            .arg("--out")
            .arg(&out)
            .args(["--np", &np.to_string(), "--dist", dist, "--threads", &threads.to_string()]),
    );
    out
}

#[test]
fn splits_agree_and_match_truth() {
    let fx = fixture(&[]);
    let base = launch(&fx, "base", 1, "block", 1);
    let baseline = read(&base.join("stats.txt"));

    // Every split must merge to the same bytes.
    for (tag, np, dist, threads) in [
        ("a", 2, "cyclic", 1),
        ("b", 3, "block", 2),
        ("c", 2, "blockcyclic:2", 2),
        ("d", 5, "block", 1), // more procs than windows: some idle
    ] {
        let out = launch(&fx, tag, np, dist, threads);
        assert_eq!(
            read(&out.join("stats.txt")),
            baseline,
            "stats diverged for np={np} dist={dist} threads={threads}"
        );
    }

    // valid_packets per window must equal the generator's truth log.
    let truth: Vec<(usize, u64)> = read(&fx.data.join("truth.tsv"))
        .lines()
        .map(|l| {
            let (id, n) = l.split_once('\t').unwrap();
            (id.parse().unwrap(), n.parse().unwrap())
        })
        .collect();
    assert_eq!(truth.len(), 3);
    for (line, (id, valid)) in baseline.lines().zip(&truth) {
        assert!(
            line.starts_with(&format!("window={id} valid_packets={valid} ")),
            "window {id}: expected valid_packets={valid}, line: {line}"
        );
    }
}

#[test]
fn merge_subcommand_reproduces_launch_merge() {
    let fx = fixture(&[]);
    let out = launch(&fx, "m", 2, "block", 1);
    let stats2 = fx.root.join("stats2.txt");
    let bench2 = fx.root.join("bench2.csv");
    run_ok(
        bin()
            .arg("merge")
            .arg("--in")
            .arg(&out)
            .arg("--stats-out")
            .arg(&stats2)
            .arg("--bench-out")
            .arg(&bench2),
    );
    assert_eq!(read(&stats2), read(&out.join("stats.txt")));
    assert_eq!(read(&bench2), read(&out.join("bench.csv")));
}

#[test]
fn run_accepts_env_rank() {
    let fx = fixture(&[]);
    let out = fx.root.join("envrun");
    for pid in 0..2 {
        let mut cmd = bin();
        cmd.arg("run")
            .arg("--manifest")
            .arg(fx.arch.join("manifest.tsv"))
            .arg("--config")
            .arg(fx.data.join("config.txt"))
            .arg("--out")
            .arg(&out)
            .env("HT_PID", pid.to_string())
            .env("HT_NP", "2");
        run_ok(&mut cmd);
    }
    assert!(out.join("stats_p0000.txt").exists());
    assert!(out.join("stats_p0001.txt").exists());
    // Both ranks together covered all three windows.
    let merged: usize = (0..2)
        .map(|p| read(&out.join(format!("stats_p{p:04}.txt"))).lines().count())
        .sum();
    assert_eq!(merged, 3);
}

#[test]
fn build_twice_is_byte_identical() {
    let fx = fixture(&[]);
    let arch2 = fx.root.join("arch2");
    run_ok(
        bin()
            .arg("build")
            .arg("--packets")
            .arg(&fx.data)
            .arg("--out")
            .arg(&arch2)
            .arg("--config")
            .arg(fx.data.join("config.txt")),
    );
    let mut names: Vec<String> = std::fs::read_dir(&fx.arch)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tar"))
        .collect();
    names.sort();
    assert_eq!(names.len(), 12, "3 windows x 4 archives");
    for name in names {
        let a = std::fs::read(fx.arch.join(&name)).unwrap();
        let b = std::fs::read(arch2.join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical builds");
    }
}

#[test]
fn subranges_produce_archives_and_stats_columns() {
    let fx = fixture(&["--subranges", "0-511:0-511;512-1023:all"]);
    // Each of the 4 main archives per window gets one companion per range.
    let subr: Vec<String> = std::fs::read_dir(&fx.arch)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.contains("_r"))
        .collect();
    assert_eq!(subr.len(), 3 * 4 * 2);
    assert!(subr.iter().any(|n| n == "w0000_a0000_r00.tar"));
    assert!(subr.iter().any(|n| n == "w0002_a0003_r01.tar"));

    let out = launch(&fx, "sub", 2, "cyclic", 1);
    let stats = read(&out.join("stats.txt"));
    for line in stats.lines() {
        assert!(line.contains(" sub0_valid_packets="), "missing sub0: {line}");
        assert!(line.contains(" sub1_max_dest_fanin="), "missing sub1: {line}");
    }
}

#[test]
fn report_aggregates_runs() {
    let fx = fixture(&[]);
    let r1 = launch(&fx, "r1", 1, "block", 1);
    let r2 = launch(&fx, "r2", 2, "block", 1);
    let rep = fx.root.join("rep");
    let table = run_ok(
        bin()
            .arg("report")
            .arg(r1.join("bench.csv"))
            .arg(r2.join("bench.csv"))
            .arg("--out")
            .arg(&rep),
    );
    assert!(table.contains("n_procs"), "missing header: {table}");
    assert!(table.contains("baseline: n_procs=1 n_threads=1"));
    // Both configurations saw all 3 windows and the same packet total.
    let rows: Vec<&str> = table
        .lines()
        .filter(|l| l.trim_start().starts_with(['1', '2']))
        .collect();
    assert_eq!(rows.len(), 2, "table:\n{table}");
    let csv = read(&rep.join("scaling.csv"));
    assert!(csv.lines().count() == 3, "header + 2 rows: {csv}");
    assert!(rep.join("plot_scaling.py").exists());
}

#[test]
fn degenerate_config_single_matrix_window() {
    // nv == np_packets: one matrix per window, one archive.
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let arch = dir.path().join("arch");
    run_ok(
        bin()
            .arg("generate")
            .args([
                "--np-packets",
                "256",
                "--nv",
                "256",
                "--nmat-per-file",
                "4",
                "--log2-dim",
                "6",
                "--windows",
                "1",
                "--seed",
                "9",
            ])
            .arg("--out")
            .arg(&data),
    );
    run_ok(
        bin()
            .arg("build")
            .arg("--packets")
            .arg(&data)
            .arg("--out")
            .arg(&arch)
            .arg("--config")
            .arg(data.join("config.txt")),
    );
    let tars: Vec<_> = std::fs::read_dir(&arch)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tar"))
        .collect();
    assert_eq!(tars, vec!["w0000_a0000.tar".to_string()]);
}

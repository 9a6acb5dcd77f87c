//! Command-line front end: generate synthetic traces, build archive sets,
//! run/launch the per-window analysis, merge worker outputs, and report
//! scaling.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hypertm::bench::parse_bench_csv;
use hypertm::config_file::{
    load_config, parse_bool, parse_count, parse_key, parse_subranges, render_config,
};
use hypertm::gen::{self, GenParams, PacketReader};
use hypertm::pipeline::{
    self, process_filelist, read_manifest, stats_file_name, write_manifest, RunParams,
    WindowFiles,
};
use hypertm::report::{build_report, render_csv, render_plot_script, render_table};
use hypertm_core::{build_window, ChallengeConfig, Dist, Dmap};

const PID_ENV: &str = "HT_PID";
const NP_ENV: &str = "HT_NP";

#[derive(Parser)]
#[command(
    name = "hypertm",
    version,
    about = "Anonymized traffic-matrix pipeline and desk-scale scaling harness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write synthetic packet windows and their truth log
    Generate(GenerateArgs),
    /// Anonymize, build matrices, and save per-window tar archives
    Build(BuildArgs),
    /// Process this worker's owned windows (one process of a parallel run)
    Run(RunArgs),
    /// Spawn n worker processes, wait, and merge their outputs
    Launch(LaunchArgs),
    /// Merge per-pid stats and bench files
    Merge(MergeArgs),
    /// Aggregate bench CSVs into a scaling table, CSV, and plot script
    Report(ReportArgs),
}

/// Pipeline constants; a config file provides the base values and
/// individual flags override it.
#[derive(Args)]
struct ConfigArgs {
    /// key=value config file (see `generate`'s emitted config.txt)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Packets per window (accepts 2^k)
    #[arg(long)]
    np_packets: Option<String>,
    /// Packets per matrix (accepts 2^k)
    #[arg(long)]
    nv: Option<String>,
    /// Matrices per archive (accepts 2^k)
    #[arg(long)]
    nmat_per_file: Option<String>,
    /// Address-space width k (matrices are 2^k x 2^k)
    #[arg(long)]
    log2_dim: Option<u8>,
    /// 128-bit anonymization key (decimal or 0x hex)
    #[arg(long)]
    anon_key: Option<String>,
    /// Whether to anonymize addresses (true/false)
    #[arg(long)]
    anonymize: Option<String>,
    /// Subranges as SRC:DST pairs separated by ';' (sets: lo-hi, a,b,c, all)
    #[arg(long)]
    subranges: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ChallengeConfig> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => ChallengeConfig::default(),
        };
        let count = |s: &String| parse_count(s).map_err(anyhow::Error::msg);
        if let Some(v) = &self.np_packets {
            cfg.np_packets = count(v)?;
        }
        if let Some(v) = &self.nv {
            cfg.nv = count(v)?;
        }
        if let Some(v) = &self.nmat_per_file {
            cfg.nmat_per_file = count(v)?;
        }
        if let Some(v) = self.log2_dim {
            cfg.log2_dim = v;
        }
        if let Some(v) = &self.anon_key {
            cfg.anon_key = parse_key(v).map_err(anyhow::Error::msg)?;
        }
        if let Some(v) = &self.anonymize {
            cfg.anonymize = parse_bool(v).map_err(anyhow::Error::msg)?;
        }
        if let Some(v) = &self.subranges {
            cfg.subranges = parse_subranges(v, cfg.log2_dim).map_err(anyhow::Error::msg)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Output directory for packet files, truth.tsv, and config.txt
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    windows: usize,
    /// Fraction of packets marked invalid
    #[arg(long, default_value_t = 0.05)]
    invalid_fraction: f64,
    /// Zipf popularity exponent for address draws
    #[arg(long, default_value_t = 1.2)]
    zipf_exponent: f64,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Directory of packets_w*.bin files (from `generate`)
    #[arg(long)]
    packets: PathBuf,
    /// Output directory for archives and manifest.tsv
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// manifest.tsv from `build`
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory for per-pid stats/bench files
    #[arg(long)]
    out: PathBuf,
    /// This worker's rank (falls back to HT_PID)
    #[arg(long)]
    pid: Option<usize>,
    /// Total worker count (falls back to HT_NP)
    #[arg(long)]
    np: Option<usize>,
    /// Window distribution: block, cyclic, or blockcyclic:<b>
    #[arg(long, default_value = "block")]
    dist: String,
    /// Threads for intra-window summation
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct LaunchArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker process count
    #[arg(long)]
    np: usize,
    #[arg(long, default_value = "block")]
    dist: String,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct MergeArgs {
    /// Directory holding stats_p*.txt and bench_p*.csv
    #[arg(long = "in")]
    in_dir: PathBuf,
    #[arg(long, default_value = "stats.txt")]
    stats_out: PathBuf,
    #[arg(long, default_value = "bench.csv")]
    bench_out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Bench CSVs to aggregate
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Directory to write scaling.csv and plot_scaling.py into
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_dist(s: &str) -> Result<Dist> {
    let s = s.trim();
    if let Some(b) = s
        .strip_prefix("blockcyclic:")
        .or_else(|| s.strip_prefix("bc:"))
    {
        let b: usize = b.parse().with_context(|| format!("bad block size {:?}", b))?;
        return Ok(Dist::BlockCyclic(b));
    }
    match s {
        "block" => Ok(Dist::Block),
        "cyclic" => Ok(Dist::Cyclic),
        other => bail!("unknown distribution {:?} (block, cyclic, blockcyclic:<b>)", other),
    }
}

fn rank_from(flag: Option<usize>, name: &str, env: &str) -> Result<usize> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(env) {
        Ok(s) => s
            .parse()
            .with_context(|| format!("bad {} value {:?}", env, s)),
        Err(_) => bail!("missing --{} flag and {} variable", name, env),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let cfg = args.cfg.resolve()?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let params = GenParams {
        seed: args.seed,
        n_windows: args.windows,
        invalid_fraction: args.invalid_fraction,
        zipf_exponent: args.zipf_exponent,
    };
    let truth = gen::generate(&params, &cfg, &args.out)?;
    std::fs::write(args.out.join("config.txt"), render_config(&cfg))
        .context("writing config.txt")?;
    let total_valid: u64 = truth.iter().map(|(_, n)| n).sum();
    println!(
        "generated {} window(s) x {} packets ({} valid) in {}",
        truth.len(),
        cfg.np_packets,
        total_valid,
        args.out.display()
    );
    Ok(())
}

fn discover_packet_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>> {
    let mut out = Vec::new();
    for entry in
        std::fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))?
    {
        let path = entry?.path();
        let name = match path.file_name().and_then(|n| n.to_str()) {
            Some(n) => n,
            None => continue,
        };
        if let Some(id) = name
            .strip_prefix("packets_w")
            .and_then(|s| s.strip_suffix(".bin"))
            .and_then(|s| s.parse::<usize>().ok())
        {
            out.push((id, path));
        }
    }
    out.sort();
    if out.is_empty() {
        bail!("no packets_w*.bin files in {}", dir.display());
    }
    Ok(out)
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let cfg = args.cfg.resolve()?;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut windows = Vec::new();
    let mut n_archives = 0usize;
    let mut n_subrange = 0usize;
    for (window_id, path) in discover_packet_files(&args.packets)? {
        let reader = PacketReader::open(&path)?;
        let mut read_error = None;
        let packets = reader.map_while(|r| match r {
            Ok(p) => Some(p),
            Err(e) => {
                read_error = Some(e);
                None
            }
        });
        let matrices = build_window(packets, &cfg)?;
        if let Some(e) = read_error {
            return Err(e.into());
        }
        let saved = pipeline::save_window(&matrices, &cfg, window_id, &args.out)?;
        n_archives += saved.main.len();
        n_subrange += saved.subrange.len();
        windows.push(WindowFiles {
            window_id,
            archives: saved.main,
        });
    }
    let manifest = args.out.join("manifest.tsv");
    write_manifest(&manifest, &windows)?;
    println!(
        "built {} window(s): {} archive(s), {} subrange archive(s), manifest {}",
        windows.len(),
        n_archives,
        n_subrange,
        manifest.display()
    );
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let cfg = args.cfg.resolve()?;
    let pid = rank_from(args.pid, "pid", PID_ENV)?;
    let n_procs = rank_from(args.np, "np", NP_ENV)?;
    if pid >= n_procs {
        bail!("pid {} outside 0..{}", pid, n_procs);
    }
    if args.threads == 0 {
        bail!("--threads must be at least 1");
    }
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let windows = read_manifest(&args.manifest)?;
    let dmap = Dmap::rows(n_procs, parse_dist(&args.dist)?)?;
    let params = RunParams {
        windows: &windows,
        dmap: &dmap,
        pid,
        n_procs,
        n_threads: args.threads,
        cfg: &cfg,
    };
    let outcome = process_filelist(&params, &args.out)?;
    println!(
        "pid {}: processed {} window(s) -> {}",
        pid,
        outcome.processed.len(),
        args.out.join(stats_file_name(pid)).display()
    );
    if !outcome.failures.is_empty() {
        bail!("{} window(s) failed", outcome.failures.len());
    }
    Ok(())
}

fn clear_pid_files(dir: &Path) -> Result<()> {
    for kind in [("stats_p", ".txt"), ("bench_p", ".csv")] {
        for path in pipeline::find_pid_files(dir, kind.0, kind.1)? {
            std::fs::remove_file(&path)
                .with_context(|| format!("removing stale {}", path.display()))?;
        }
    }
    Ok(())
}

fn cmd_launch(args: LaunchArgs) -> Result<()> {
    if args.np == 0 {
        bail!("--np must be at least 1");
    }
    let cfg = args.cfg.resolve()?;
    parse_dist(&args.dist)?; // fail before spawning anything
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    clear_pid_files(&args.out)?;
    let cfg_path = args.out.join("launch_config.txt");
    std::fs::write(&cfg_path, render_config(&cfg)).context("writing launch config")?;

    let exe = std::env::current_exe().context("locating own executable")?;
    let mut children = Vec::new();
    for pid in 0..args.np {
        let child = std::process::Command::new(&exe)
            .arg("run")
            .arg("--manifest")
            .arg(&args.manifest)
            .arg("--out")
            .arg(&args.out)
            .arg("--config")
            .arg(&cfg_path)
            .arg("--pid")
            .arg(pid.to_string())
            .arg("--np")
            .arg(args.np.to_string())
            .arg("--dist")
            .arg(&args.dist)
            .arg("--threads")
            .arg(args.threads.to_string())
            .spawn()
            .with_context(|| format!("spawning worker {}", pid))?;
        children.push((pid, child));
    }

    let mut failed = Vec::new();
    for (pid, mut child) in children {
        let status = child
            .wait()
            .with_context(|| format!("waiting for worker {}", pid))?;
        if !status.success() {
            failed.push(pid);
        }
    }

    let stats_in = pipeline::find_pid_files(&args.out, "stats_p", ".txt")?;
    let bench_in = pipeline::find_pid_files(&args.out, "bench_p", ".csv")?;
    let stats_out = args.out.join("stats.txt");
    let bench_out = args.out.join("bench.csv");
    let n_stats = pipeline::merge_stats_files(&stats_in, &stats_out)?;
    pipeline::merge_bench_files(&bench_in, &bench_out)?;
    println!(
        "merged {} window record(s) -> {} and {}",
        n_stats,
        stats_out.display(),
        bench_out.display()
    );
    if !failed.is_empty() {
        bail!("worker(s) {:?} exited nonzero", failed);
    }
    Ok(())
}

fn cmd_merge(args: MergeArgs) -> Result<()> {
    let stats_in = pipeline::find_pid_files(&args.in_dir, "stats_p", ".txt")?;
    let bench_in = pipeline::find_pid_files(&args.in_dir, "bench_p", ".csv")?;
    if stats_in.is_empty() && bench_in.is_empty() {
        bail!("no per-pid files in {}", args.in_dir.display());
    }
    let n = pipeline::merge_stats_files(&stats_in, &args.stats_out)?;
    let b = pipeline::merge_bench_files(&bench_in, &args.bench_out)?;
    println!("merged {} stats line(s), {} bench record(s)", n, b);
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let mut records = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        records.extend(
            parse_bench_csv(&text).map_err(|e| anyhow::anyhow!("{}: {}", path.display(), e))?,
        );
    }
    let report = build_report(&records)?;
    print!("{}", render_table(&report));
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let csv = dir.join("scaling.csv");
        let script = dir.join("plot_scaling.py");
        std::fs::write(&csv, render_csv(&report))?;
        std::fs::write(&script, render_plot_script(&report))?;
        println!("wrote {} and {}", csv.display(), script.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Build(args) => cmd_build(args),
        Cmd::Run(args) => cmd_run(args),
        Cmd::Launch(args) => cmd_launch(args),
        Cmd::Merge(args) => cmd_merge(args),
        Cmd::Report(args) => cmd_report(args),
    }
}

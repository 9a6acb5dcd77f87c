//! The per-window drivers: save archives, read them back, sum, analyze,
//! and the `process_filelist` loop that walks a processor's owned windows.
//!
//! Processes never communicate: each computes its owned window indices from
//! the map alone and writes results to its own per-pid files. Merging is a
//! separate concatenate-and-sort step.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hypertm_core::{
    analyze, subrange_analyze, ChallengeConfig, Dmap, DmapError, MatrixError, NetworkStats,
    TrafficMatrix, STAT_FIELDS,
};

use crate::archive::{archive_name, subrange_archive_name, write_archive, ArchiveError};
use crate::bench::{BenchRecord, Phase, BENCH_CSV_HEADER};
use crate::gen::GenError;

#[derive(Debug)]
pub enum PipelineError {
    Archive(ArchiveError),
    Matrix(MatrixError),
    Map(DmapError),
    Gen(GenError),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// An archive member's space does not match the configured space.
    DimMismatch {
        path: PathBuf,
        expected: u8,
        found: u8,
    },
    Manifest {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Archive(e) => e.fmt(f),
            PipelineError::Matrix(e) => e.fmt(f),
            PipelineError::Map(e) => e.fmt(f),
            PipelineError::Gen(e) => e.fmt(f),
            PipelineError::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            PipelineError::DimMismatch {
                path,
                expected,
                found,
            } => write!(
                f,
                "{}: matrix space 2^{} does not match configured 2^{}",
                path.display(),
                found,
                expected
            ),
            PipelineError::Manifest { path, line, reason } => {
                write!(f, "{}: line {}: {}", path.display(), line, reason)
            }
        }
    }
}

impl std::error::Error for PipelineError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            PipelineError::Archive(e) => Some(e),
            PipelineError::Matrix(e) => Some(e),
            PipelineError::Map(e) => Some(e),
            PipelineError::Gen(e) => Some(e),
            PipelineError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<ArchiveError> for PipelineError {
    fn from(e: ArchiveError) -> Self {
        PipelineError::Archive(e)
    }
}

impl From<MatrixError> for PipelineError {
    fn from(e: MatrixError) -> Self {
        PipelineError::Matrix(e)
    }
}

impl From<DmapError> for PipelineError {
    fn from(e: DmapError) -> Self {
        PipelineError::Map(e)
    }
}

impl From<GenError> for PipelineError {
    fn from(e: GenError) -> Self {
        PipelineError::Gen(e)
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One window's archive set, in archive order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowFiles {
    pub window_id: usize,
    pub archives: Vec<PathBuf>,
}

/// Archive paths written for one window.
#[derive(Debug, Clone)]
pub struct SavedWindow {
    pub main: Vec<PathBuf>,
    pub subrange: Vec<PathBuf>,
}

/// Writes a window's matrices as `ceil(len / nmat_per_file)` archives, plus
/// one masked archive per configured subrange per main archive.
pub fn save_window(
    matrices: &[TrafficMatrix],
    cfg: &ChallengeConfig,
    window_id: usize,
    out_dir: &Path,
) -> Result<SavedWindow, PipelineError> {
    let nmat = cfg.nmat_per_file as usize;
    let mut main = Vec::new();
    let mut subrange = Vec::new();
    for (ai, chunk) in matrices.chunks(nmat).enumerate() {
        let path = out_dir.join(archive_name(window_id, ai));
        write_archive(chunk, window_id, ai, nmat, &path)?;
        main.push(path);
        for (ri, (src, dst)) in cfg.subranges.iter().enumerate() {
            let masked: Vec<TrafficMatrix> = chunk.iter().map(|m| m.diag_mask(src, dst)).collect();
            let spath = out_dir.join(subrange_archive_name(window_id, ai, ri));
            write_archive(&masked, window_id, ai, nmat, &spath)?;
            subrange.push(spath);
        }
    }
    Ok(SavedWindow { main, subrange })
}

/// Wall-clock attribution of one window's summation, split into the decode
/// (read) share and the accumulate (sum) share. The two are disjoint and
/// add up to the measured wall time of the whole pass.
#[derive(Debug, Clone, Copy)]
pub struct SumTimings {
    pub read_seconds: f64,
    pub sum_seconds: f64,
}

fn sum_paths(paths: &[PathBuf], log2_dim: u8) -> Result<(TrafficMatrix, f64, f64), PipelineError> {
    let mut acc = TrafficMatrix::empty(log2_dim)?;
    let mut decode = 0.0f64;
    let mut add = 0.0f64;
    for path in paths {
        let t = Instant::now();
        let matrices = crate::archive::read_archive(path)?;
        decode += t.elapsed().as_secs_f64();
        for m in matrices {
            if m.log2_dim() != log2_dim {
                return Err(PipelineError::DimMismatch {
                    path: path.clone(),
                    expected: log2_dim,
                    found: m.log2_dim(),
                });
            }
            let t = Instant::now();
            acc.add_assign(&m)?;
            add += t.elapsed().as_secs_f64();
        }
    }
    Ok((acc, decode, add))
}

/// Streams every matrix of every archive into one accumulator, starting from
/// the zero matrix. Peak residency is one decoded archive plus the
/// accumulator (per thread). With `n_threads > 1`, contiguous path chunks
/// are summed into partial accumulators which are then reduced in chunk
/// order; integer addition makes the result independent of thread count.
pub fn sum_window(
    paths: &[PathBuf],
    log2_dim: u8,
    n_threads: usize,
) -> Result<(TrafficMatrix, SumTimings), PipelineError> {
    let t0 = Instant::now();
    let (acc, decode, add) = if n_threads <= 1 || paths.len() <= 1 {
        sum_paths(paths, log2_dim)?
    } else {
        let chunk_size = paths.len().div_ceil(n_threads);
        let partials: Vec<Result<(TrafficMatrix, f64, f64), PipelineError>> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = paths
                    .chunks(chunk_size)
                    .map(|chunk| scope.spawn(move || sum_paths(chunk, log2_dim)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("summation worker panicked"))
                    .collect()
            });
        let mut acc = TrafficMatrix::empty(log2_dim)?;
        let mut decode = 0.0;
        let mut add = 0.0;
        for partial in partials {
            let (m, d, a) = partial?;
            acc.add_assign(&m)?;
            decode += d;
            add += a;
        }
        (acc, decode, add)
    };
    let wall = t0.elapsed().as_secs_f64();
    let busy = decode + add;
    let read_share = if busy > 0.0 { decode / busy } else { 0.5 };
    let read_seconds = (wall * read_share).max(1e-9);
    let sum_seconds = (wall - wall * read_share).max(1e-9);
    Ok((
        acc,
        SumTimings {
            read_seconds,
            sum_seconds,
        },
    ))
}

pub fn stats_file_name(pid: usize) -> String {
    format!("stats_p{:04}.txt", pid)
}

pub fn bench_file_name(pid: usize) -> String {
    format!("bench_p{:04}.csv", pid)
}

/// One stats line: the window id, the nine statistics in canonical order,
/// then one `sub<i>_`-prefixed group of nine per configured subrange.
pub fn format_stats_line(window_id: usize, main: &NetworkStats, subs: &[NetworkStats]) -> String {
    let mut line = format!("window={}", window_id);
    for (name, value) in STAT_FIELDS.iter().zip(main.values()) {
        line.push_str(&format!(" {}={}", name, value));
    }
    for (i, sub) in subs.iter().enumerate() {
        for (name, value) in STAT_FIELDS.iter().zip(sub.values()) {
            line.push_str(&format!(" sub{}_{}={}", i, name, value));
        }
    }
    line
}

/// Window id of a stats line (its leading `window=` field).
pub fn stats_line_window_id(line: &str) -> Option<usize> {
    line.strip_prefix("window=")?
        .split_whitespace()
        .next()?
        .parse()
        .ok()
}

pub struct RunParams<'a> {
    pub windows: &'a [WindowFiles],
    pub dmap: &'a Dmap,
    pub pid: usize,
    pub n_procs: usize,
    pub n_threads: usize,
    pub cfg: &'a ChallengeConfig,
}

/// What one worker did: which windows it processed, which failed (window id
/// and message), and every statistics record it produced.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub processed: Vec<usize>,
    pub failures: Vec<(usize, String)>,
    pub stats: Vec<NetworkStats>,
}

fn run_one_window(
    wf: &WindowFiles,
    params: &RunParams,
) -> Result<(String, Vec<BenchRecord>, Vec<NetworkStats>), PipelineError> {
    let (a_t, timings) = sum_window(&wf.archives, params.cfg.log2_dim, params.n_threads)?;

    let t = Instant::now();
    let main = analyze(&a_t);
    let subs = subrange_analyze(&a_t, &params.cfg.subranges);
    let analyze_seconds = t.elapsed().as_secs_f64().max(1e-9);

    let packets = main.valid_packets;
    let record = |phase, wall_seconds| BenchRecord {
        phase,
        window_id: wf.window_id,
        pid: params.pid,
        n_procs: params.n_procs,
        n_threads: params.n_threads,
        wall_seconds,
        packets_processed: packets,
    };
    let records = vec![
        record(Phase::Read, timings.read_seconds),
        record(Phase::Sum, timings.sum_seconds),
        record(Phase::Analyze, analyze_seconds),
    ];

    let line = format_stats_line(wf.window_id, &main, &subs);
    let mut stats = vec![main];
    stats.extend(subs);
    Ok((line, records, stats))
}

/// Processes every window this pid owns under the map, appending one stats
/// line and three bench records per window to the per-pid files in
/// `out_dir`. Files are created even when nothing is owned. A failing
/// window is reported and skipped; the remaining owned windows still run.
pub fn process_filelist(params: &RunParams, out_dir: &Path) -> Result<RunOutcome, PipelineError> {
    let owned = params
        .dmap
        .global_ind(&[params.windows.len(), 1], 0, params.pid)?;

    let stats_path = out_dir.join(stats_file_name(params.pid));
    let bench_path = out_dir.join(bench_file_name(params.pid));
    let mut stats_out =
        BufWriter::new(File::create(&stats_path).map_err(io_err(&stats_path))?);
    let mut bench_out =
        BufWriter::new(File::create(&bench_path).map_err(io_err(&bench_path))?);
    writeln!(bench_out, "{}", BENCH_CSV_HEADER).map_err(io_err(&bench_path))?;

    let mut outcome = RunOutcome::default();
    for &idx in &owned {
        let wf = &params.windows[idx];
        match run_one_window(wf, params) {
            Ok((line, records, stats)) => {
                writeln!(stats_out, "{}", line).map_err(io_err(&stats_path))?;
                for r in &records {
                    writeln!(bench_out, "{}", r.to_csv_line()).map_err(io_err(&bench_path))?;
                }
                outcome.processed.push(wf.window_id);
                outcome.stats.extend(stats);
            }
            Err(e) => {
                eprintln!("window {}: {}", wf.window_id, e);
                outcome.failures.push((wf.window_id, e.to_string()));
            }
        }
    }
    stats_out.flush().map_err(io_err(&stats_path))?;
    bench_out.flush().map_err(io_err(&bench_path))?;
    Ok(outcome)
}

/// Writes the window list as `window_id<TAB>path` lines, one archive per
/// line in order, paths relative to the manifest's directory when possible.
pub fn write_manifest(path: &Path, windows: &[WindowFiles]) -> Result<(), PipelineError> {
    let parent = path.parent().unwrap_or(Path::new(""));
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for wf in windows {
        for archive in &wf.archives {
            let rel = archive.strip_prefix(parent).unwrap_or(archive);
            writeln!(out, "{}\t{}", wf.window_id, rel.display()).map_err(io_err(path))?;
        }
    }
    out.flush().map_err(io_err(path))
}

/// Reads a manifest back; relative paths resolve against the manifest's
/// directory. Windows come back sorted by id, archives in line order.
pub fn read_manifest(path: &Path) -> Result<Vec<WindowFiles>, PipelineError> {
    let parent = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut by_id: std::collections::BTreeMap<usize, Vec<PathBuf>> =
        std::collections::BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| PipelineError::Manifest {
            path: path.to_path_buf(),
            line: i + 1,
            reason: reason.to_string(),
        };
        let (id, rel) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
        let id: usize = id.parse().map_err(|_| bad("bad window id"))?;
        if rel.is_empty() {
            return Err(bad("empty path"));
        }
        let p = PathBuf::from(rel);
        let abs = if p.is_absolute() { p } else { parent.join(p) };
        by_id.entry(id).or_default().push(abs);
    }
    Ok(by_id
        .into_iter()
        .map(|(window_id, archives)| WindowFiles {
            window_id,
            archives,
        })
        .collect())
}

/// Per-pid output files of one kind (`stats_p*.txt` / `bench_p*.csv`) in a
/// directory, sorted by name.
pub fn find_pid_files(dir: &Path, prefix: &str, suffix: &str) -> Result<Vec<PathBuf>, PipelineError> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let name = entry.file_name();
        let name = name.to_string_lossy();
        if name.starts_with(prefix) && name.ends_with(suffix) {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

/// Concatenates per-pid stats files and orders the lines by window id.
/// Returns the merged line count.
pub fn merge_stats_files(inputs: &[PathBuf], out_path: &Path) -> Result<usize, PipelineError> {
    let mut lines: Vec<(usize, String)> = Vec::new();
    for input in inputs {
        let text = std::fs::read_to_string(input).map_err(io_err(input))?;
        for line in text.lines() {
            if line.is_empty() {
                continue;
            }
            let id = stats_line_window_id(line).ok_or_else(|| PipelineError::Manifest {
                path: input.clone(),
                line: 0,
                reason: format!("stats line without window id: {:?}", line),
            })?;
            lines.push((id, line.to_string()));
        }
    }
    lines.sort_by_key(|(id, _)| *id);
    let mut out = BufWriter::new(File::create(out_path).map_err(io_err(out_path))?);
    for (_, line) in &lines {
        writeln!(out, "{}", line).map_err(io_err(out_path))?;
    }
    out.flush().map_err(io_err(out_path))?;
    Ok(lines.len())
}

/// Concatenates per-pid bench CSVs keeping a single header. Returns the
/// merged record count.
pub fn merge_bench_files(inputs: &[PathBuf], out_path: &Path) -> Result<usize, PipelineError> {
    let mut out = BufWriter::new(File::create(out_path).map_err(io_err(out_path))?);
    writeln!(out, "{}", BENCH_CSV_HEADER).map_err(io_err(out_path))?;
    let mut count = 0usize;
    for input in inputs {
        let text = std::fs::read_to_string(input).map_err(io_err(input))?;
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == BENCH_CSV_HEADER => {}
            other => {
                return Err(PipelineError::Manifest {
                    path: input.clone(),
                    line: 1,
                    reason: format!("bad bench header {:?}", other.unwrap_or("")),
                })
            }
        }
        for line in lines {
            if line.is_empty() {
                continue;
            }
            writeln!(out, "{}", line).map_err(io_err(out_path))?;
            count += 1;
        }
    }
    out.flush().map_err(io_err(out_path))?;
    Ok(count)
}

//! Synthetic packet traces: heavy-tailed (Zipf) source/destination
//! popularity, a configurable invalid-packet fraction, deterministic by
//! seed. Stands in for captured network data, which is out of scope.
//!
//! Packet files are flat little-endian records of
//! `(u32 src, u32 dst, u8 valid)` — 9 bytes each. The truth log is a TSV of
//! `window_id <TAB> valid_packets`, the ground truth the pipeline output is
//! checked against.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use hypertm_core::{ChallengeConfig, PacketRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

pub const PACKET_RECORD_LEN: usize = 9;
pub const TRUTH_FILE: &str = "truth.tsv";

pub fn packet_file_name(window_id: usize) -> String {
    format!("packets_w{:04}.bin", window_id)
}

#[derive(Debug, Clone)]
pub struct GenParams {
    pub seed: u64,
    pub n_windows: usize,
    /// Probability that a packet is marked invalid.
    pub invalid_fraction: f64,
    /// Zipf popularity exponent for both address draws.
    pub zipf_exponent: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 1,
            n_windows: 1,
            invalid_fraction: 0.05,
            zipf_exponent: 1.2,
        }
    }
}

#[derive(Debug)]
pub enum GenError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Packet file length is not a multiple of the record size.
    TruncatedRecord { path: PathBuf },
    BadParam(String),
    /// Truth log line that is not `window_id<TAB>count`.
    TruthParse { path: PathBuf, line: usize },
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            GenError::TruncatedRecord { path } => {
                write!(f, "{}: truncated packet record at end of file", path.display())
            }
            GenError::BadParam(msg) => write!(f, "bad generator parameter: {}", msg),
            GenError::TruthParse { path, line } => {
                write!(f, "{}: line {}: malformed truth entry", path.display(), line)
            }
        }
    }
}

impl std::error::Error for GenError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            GenError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> GenError + '_ {
    move |source| GenError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `params.n_windows` packet files plus the truth log into `out_dir`.
/// Returns the per-window valid-packet counts.
pub fn generate(
    params: &GenParams,
    cfg: &ChallengeConfig,
    out_dir: &Path,
) -> Result<Vec<(usize, u64)>, GenError> {
    if !(0.0..=1.0).contains(&params.invalid_fraction) {
        return Err(GenError::BadParam(format!(
            "invalid_fraction {} outside [0, 1]",
            params.invalid_fraction
        )));
    }
    if !(params.zipf_exponent > 0.0) {
        return Err(GenError::BadParam(format!(
            "zipf_exponent {} must be > 0",
            params.zipf_exponent
        )));
    }
    let zipf: Zipf<f64> = Zipf::new(cfg.dim(), params.zipf_exponent)
        .map_err(|e| GenError::BadParam(format!("zipf: {}", e)))?;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut truth = Vec::with_capacity(params.n_windows);
    for w in 0..params.n_windows {
        let path = out_dir.join(packet_file_name(w));
        let mut out = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        let mut valid_count = 0u64;
        let mut rec = [0u8; PACKET_RECORD_LEN];
        for _ in 0..cfg.np_packets {
            let src = (zipf.sample(&mut rng) as u64 - 1) as u32;
            let dst = (zipf.sample(&mut rng) as u64 - 1) as u32;
            let valid = !rng.gen_bool(params.invalid_fraction);
            valid_count += valid as u64;
            rec[0..4].copy_from_slice(&src.to_le_bytes());
            rec[4..8].copy_from_slice(&dst.to_le_bytes());
            rec[8] = valid as u8;
            out.write_all(&rec).map_err(io_err(&path))?;
        }
        out.flush().map_err(io_err(&path))?;
        truth.push((w, valid_count));
    }
    write_truth(&out_dir.join(TRUTH_FILE), &truth)?;
    Ok(truth)
}

pub fn write_truth(path: &Path, counts: &[(usize, u64)]) -> Result<(), GenError> {
    let mut out = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for (w, n) in counts {
        writeln!(out, "{}\t{}", w, n).map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_truth(path: &Path) -> Result<Vec<(usize, u64)>, GenError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let parse = || -> Option<(usize, u64)> {
            let (w, n) = line.split_once('\t')?;
            Some((w.parse().ok()?, n.parse().ok()?))
        };
        out.push(parse().ok_or(GenError::TruthParse {
            path: path.to_path_buf(),
            line: i + 1,
        })?);
    }
    Ok(out)
}

/// Streaming reader over a packet file; yields records until clean EOF.
pub struct PacketReader {
    inner: BufReader<File>,
    path: PathBuf,
    done: bool,
}

impl PacketReader {
    pub fn open(path: &Path) -> Result<Self, GenError> {
        Ok(PacketReader {
            inner: BufReader::new(File::open(path).map_err(io_err(path))?),
            path: path.to_path_buf(),
            done: false,
        })
    }
}

impl Iterator for PacketReader {
    type Item = Result<PacketRecord, GenError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut buf = [0u8; PACKET_RECORD_LEN];
        let mut got = 0;
        while got < PACKET_RECORD_LEN {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => break,
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => {
                    self.done = true;
                    return Some(Err(GenError::Io {
                        path: self.path.clone(),
                        source: e,
                    }));
                }
            }
        }
        match got {
            0 => {
                self.done = true;
                None
            }
            PACKET_RECORD_LEN => Some(Ok(PacketRecord::new(
                u32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]),
                u32::from_le_bytes([buf[4], buf[5], buf[6], buf[7]]),
                buf[8] != 0,
            ))),
            _ => {
                self.done = true;
                Some(Err(GenError::TruncatedRecord {
                    path: self.path.clone(),
                }))
            }
        }
    }
}

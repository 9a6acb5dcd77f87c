//! Per-phase wall-time records emitted by the workers and their CSV form.

use std::fmt;

pub const BENCH_CSV_HEADER: &str =
    "phase,window_id,pid,n_procs,n_threads,wall_seconds,packets_processed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Read,
    Sum,
    Analyze,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Read => "read",
            Phase::Sum => "sum",
            Phase::Analyze => "analyze",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        match s {
            "read" => Some(Phase::Read),
            "sum" => Some(Phase::Sum),
            "analyze" => Some(Phase::Analyze),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One timed phase of one window on one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub phase: Phase,
    pub window_id: usize,
    pub pid: usize,
    pub n_procs: usize,
    pub n_threads: usize,
    pub wall_seconds: f64,
    pub packets_processed: u64,
}

impl BenchRecord {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.9},{}",
            self.phase,
            self.window_id,
            self.pid,
            self.n_procs,
            self.n_threads,
            self.wall_seconds,
            self.packets_processed
        )
    }
}

#[derive(Debug)]
pub enum BenchParseError {
    /// First line is not the expected header.
    Header { found: String },
    Field { line: usize, reason: String },
}

impl fmt::Display for BenchParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchParseError::Header { found } => {
                write!(f, "line 1: bad header {:?} (expected {:?})", found, BENCH_CSV_HEADER)
            }
            BenchParseError::Field { line, reason } => write!(f, "line {}: {}", line, reason),
        }
    }
}

impl std::error::Error for BenchParseError {}

/// Parses one bench CSV (header + records), validating the record
/// invariants: known phase, positive wall time.
pub fn parse_bench_csv(text: &str) -> Result<Vec<BenchRecord>, BenchParseError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == BENCH_CSV_HEADER => {}
        Some((_, h)) => {
            return Err(BenchParseError::Header {
                found: h.to_string(),
            })
        }
        None => {
            return Err(BenchParseError::Header {
                found: String::new(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let field_err = |reason: String| BenchParseError::Field {
            line: lineno,
            reason,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(field_err(format!("expected 7 fields, got {}", fields.len())));
        }
        let phase = Phase::parse(fields[0])
            .ok_or_else(|| field_err(format!("unknown phase {:?}", fields[0])))?;
        let parse_usize = |s: &str, what: &str| {
            s.parse::<usize>()
                .map_err(|_| field_err(format!("bad {}: {:?}", what, s)))
        };
        let record = BenchRecord {
            phase,
            window_id: parse_usize(fields[1], "window_id")?,
            pid: parse_usize(fields[2], "pid")?,
            n_procs: parse_usize(fields[3], "n_procs")?,
            n_threads: parse_usize(fields[4], "n_threads")?,
            wall_seconds: fields[5]
                .parse::<f64>()
                .map_err(|_| field_err(format!("bad wall_seconds: {:?}", fields[5])))?,
            packets_processed: fields[6]
                .parse::<u64>()
                .map_err(|_| field_err(format!("bad packets_processed: {:?}", fields[6])))?,
        };
        if !(record.wall_seconds > 0.0) {
            return Err(field_err(format!(
                "wall_seconds {} is not positive",
                record.wall_seconds
            )));
        }
        out.push(record);
    }
    Ok(out)
}

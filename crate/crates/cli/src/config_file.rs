//! `key=value` config files mirroring the pipeline constants, plus the
//! shared value syntax used by the CLI flags: counts accept `2^k` or
//! decimal, keys accept hex, and subranges are `SRC:DST` pairs of address
//! sets (`lo-hi`, `a,b,c`, or `all`) separated by `;`.

use std::fmt;
use std::path::{Path, PathBuf};

use hypertm_core::{AddressSet, ChallengeConfig};

#[derive(Debug)]
pub enum ConfigFileError {
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    Line {
        path: PathBuf,
        line: usize,
        reason: String,
    },
}

impl fmt::Display for ConfigFileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigFileError::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            ConfigFileError::Line { path, line, reason } => {
                write!(f, "{}: line {}: {}", path.display(), line, reason)
            }
        }
    }
}

impl std::error::Error for ConfigFileError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConfigFileError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// `2^k` or a plain decimal.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Some(exp) = s.strip_prefix("2^") {
        let k: u32 = exp
            .parse()
            .map_err(|_| format!("bad exponent in {:?}", s))?;
        if k >= 64 {
            return Err(format!("2^{} does not fit in 64 bits", k));
        }
        return Ok(1u64 << k);
    }
    s.parse().map_err(|_| format!("bad count {:?}", s))
}

/// Decimal or `0x`-prefixed hex, up to 128 bits.
pub fn parse_key(s: &str) -> Result<u128, String> {
    let s = s.trim();
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        return u128::from_str_radix(hex, 16).map_err(|_| format!("bad hex key {:?}", s));
    }
    s.parse().map_err(|_| format!("bad key {:?}", s))
}

pub fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(format!("bad boolean {:?}", other)),
    }
}

fn parse_address_set(s: &str, log2_dim: u8) -> Result<AddressSet, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty address set".to_string());
    }
    if s == "all" {
        return Ok(AddressSet::full(log2_dim));
    }
    if let Some((lo, hi)) = s.split_once('-') {
        let lo: u32 = lo.trim().parse().map_err(|_| format!("bad bound {:?}", lo))?;
        let hi: u32 = hi.trim().parse().map_err(|_| format!("bad bound {:?}", hi))?;
        return AddressSet::range(lo, hi).map_err(|e| e.to_string());
    }
    let mut indices = Vec::new();
    for part in s.split(',') {
        indices.push(
            part.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad address {:?}", part))?,
        );
    }
    Ok(AddressSet::list(indices))
}

/// `SRC:DST` pairs separated by `;`; an empty string means no subranges.
pub fn parse_subranges(
    s: &str,
    log2_dim: u8,
) -> Result<Vec<(AddressSet, AddressSet)>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for pair in s.split(';') {
        let (src, dst) = pair
            .split_once(':')
            .ok_or_else(|| format!("subrange {:?} is not SRC:DST", pair))?;
        out.push((
            parse_address_set(src, log2_dim)?,
            parse_address_set(dst, log2_dim)?,
        ));
    }
    Ok(out)
}

fn render_address_set(set: &AddressSet, log2_dim: u8) -> String {
    if *set == AddressSet::full(log2_dim) {
        return "all".to_string();
    }
    set.to_string()
}

/// The config in file syntax; `load_config` of the output reproduces it.
pub fn render_config(cfg: &ChallengeConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("np_packets={}\n", cfg.np_packets));
    out.push_str(&format!("nv={}\n", cfg.nv));
    out.push_str(&format!("nmat_per_file={}\n", cfg.nmat_per_file));
    out.push_str(&format!("log2_dim={}\n", cfg.log2_dim));
    out.push_str(&format!("anon_key=0x{:032x}\n", cfg.anon_key));
    out.push_str(&format!("anonymize={}\n", cfg.anonymize));
    let subranges = cfg
        .subranges
        .iter()
        .map(|(s, d)| {
            format!(
                "{}:{}",
                render_address_set(s, cfg.log2_dim),
                render_address_set(d, cfg.log2_dim)
            )
        })
        .collect::<Vec<_>>()
        .join(";");
    out.push_str(&format!("subranges={}\n", subranges));
    out
}

/// Parses a config file over the defaults. Lines are `key=value`; `#` starts
/// a comment; unknown keys are errors. Subranges are interpreted against the
/// file's final `log2_dim`.
pub fn load_config(path: &Path) -> Result<ChallengeConfig, ConfigFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut cfg = ChallengeConfig::default();
    let mut subranges_raw: Option<(usize, String)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: String| ConfigFileError::Line {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected key=value".to_string()))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "np_packets" => cfg.np_packets = parse_count(value).map_err(err)?,
            "nv" => cfg.nv = parse_count(value).map_err(err)?,
            "nmat_per_file" => cfg.nmat_per_file = parse_count(value).map_err(err)?,
            "log2_dim" => {
                cfg.log2_dim = value
                    .parse()
                    .map_err(|_| err(format!("bad log2_dim {:?}", value)))?
            }
            "anon_key" => cfg.anon_key = parse_key(value).map_err(err)?,
            "anonymize" => cfg.anonymize = parse_bool(value).map_err(err)?,
            "subranges" => subranges_raw = Some((i + 1, value.to_string())),
            other => return Err(err(format!("unknown key {:?}", other))),
        }
    }
    if let Some((line, raw)) = subranges_raw {
        cfg.subranges =
            parse_subranges(&raw, cfg.log2_dim).map_err(|reason| ConfigFileError::Line {
                path: path.to_path_buf(),
                line,
                reason,
            })?;
    }
    Ok(cfg)
}

//! Per-window matrix construction from a packet stream.

use alloc::vec::Vec;

use crate::anon::Anonymizer;
use crate::config::ChallengeConfig;
use crate::matrix::{MatrixError, TrafficMatrix};

/// One observed packet: source and destination addresses plus a validity
/// flag. Extraction from capture files is out of scope; records arrive from
/// the synthetic generator or a pre-extracted binary stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketRecord {
    pub src: u32,
    pub dst: u32,
    pub valid: bool,
}

impl PacketRecord {
    pub fn new(src: u32, dst: u32, valid: bool) -> Self {
        PacketRecord { src, dst, valid }
    }
}

/// Chunks one window's packet stream into traffic matrices of `cfg.nv`
/// packets each, dropping invalid packets and anonymizing the rest.
///
/// Chunk boundaries count every packet, valid or not, so matrix boundaries
/// stay aligned to `nv` regardless of the validity mix; invalid packets
/// simply contribute no entries. Source and destination pass through the
/// same keyed permutation. A short final chunk yields a short final matrix.
pub fn build_window<I>(packets: I, cfg: &ChallengeConfig) -> Result<Vec<TrafficMatrix>, MatrixError>
where
    I: IntoIterator<Item = PacketRecord>,
{
    let anon = if cfg.anonymize {
        Some(
            Anonymizer::new(cfg.anon_key, cfg.log2_dim)
                .map_err(|_| MatrixError::BadLog2Dim(cfg.log2_dim))?,
        )
    } else {
        None
    };
    let dim = cfg.dim();
    let nv = cfg.nv.max(1) as usize;

    let mut matrices = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut in_chunk = 0usize;

    for p in packets {
        if p.valid {
            if p.src as u64 >= dim || p.dst as u64 >= dim {
                return Err(MatrixError::IndexOutOfRange {
                    row: p.src,
                    col: p.dst,
                    log2_dim: cfg.log2_dim,
                });
            }
            let pair = match &anon {
                Some(a) => (a.anonymize(p.src), a.anonymize(p.dst)),
                None => (p.src, p.dst),
            };
            pairs.push(pair);
        }
        in_chunk += 1;
        if in_chunk == nv {
            matrices.push(TrafficMatrix::from_pairs(cfg.log2_dim, pairs.drain(..))?);
            in_chunk = 0;
        }
    }
    if in_chunk > 0 {
        matrices.push(TrafficMatrix::from_pairs(cfg.log2_dim, pairs.drain(..))?);
    }
    Ok(matrices)
}

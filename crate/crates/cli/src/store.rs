//! Bit-exact binary serialization of traffic matrices (`.htmx`).
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! "HTMX" | u8 version=1 | u8 log2_dim | u16 reserved=0 | u64 nnz
//! nnz x (u32 row, u32 col, u64 count), sorted by (row, col)
//! ```
//!
//! The format is fixed-width and canonical: the same matrix always produces
//! identical bytes, and decoding re-validates every invariant the in-memory
//! type guarantees.

use std::fmt;

use hypertm_core::{Entry, MatrixError, TrafficMatrix};

pub const MAGIC: [u8; 4] = *b"HTMX";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;
pub const TRIPLE_LEN: usize = 16;

#[derive(Debug)]
pub enum DecodeError {
    /// Fewer bytes than the header or the declared payload requires.
    Truncated { needed: usize, have: usize },
    BadMagic([u8; 4]),
    BadVersion(u8),
    /// Reserved header bytes must be zero in version 1.
    BadReserved(u16),
    /// Bytes left over after the declared payload.
    TrailingBytes(usize),
    /// The payload violates a matrix invariant (bounds, order, duplicates,
    /// zero counts, bad dimension) — carries the precise violation.
    Matrix(MatrixError),
}

impl fmt::Display for DecodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeError::Truncated { needed, have } => {
                write!(f, "truncated matrix: need {} bytes, have {}", needed, have)
            }
            DecodeError::BadMagic(found) => {
                write!(f, "bad magic {:02x?} (expected \"HTMX\")", found)
            }
            DecodeError::BadVersion(v) => write!(f, "unsupported format version {}", v),
            DecodeError::BadReserved(v) => write!(f, "reserved header field is {:#06x}", v),
            DecodeError::TrailingBytes(n) => write!(f, "{} trailing bytes after payload", n),
            DecodeError::Matrix(e) => write!(f, "invalid matrix payload: {}", e),
        }
    }
}

impl std::error::Error for DecodeError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            DecodeError::Matrix(e) => Some(e),
            _ => None,
        }
    }
}

/// Encodes `a` into the canonical byte form. Infallible: every valid
/// `TrafficMatrix` has exactly one encoding.
pub fn serialize_matrix(a: &TrafficMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + a.entries().len() * TRIPLE_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(a.log2_dim());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&a.nnz().to_le_bytes());
    for e in a.entries() {
        out.extend_from_slice(&e.row.to_le_bytes());
        out.extend_from_slice(&e.col.to_le_bytes());
        out.extend_from_slice(&e.count.to_le_bytes());
    }
    out
}

fn le_u16(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes([b[0], b[1], b[2], b[3]])
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes([b[0], b[1], b[2], b[3], b[4], b[5], b[6], b[7]])
}

/// Decodes and fully validates one serialized matrix.
pub fn deserialize_matrix(bytes: &[u8]) -> Result<TrafficMatrix, DecodeError> {
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::Truncated {
            needed: HEADER_LEN,
            have: bytes.len(),
        });
    }
    let magic = [bytes[0], bytes[1], bytes[2], bytes[3]];
    if magic != MAGIC {
        return Err(DecodeError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::BadVersion(bytes[4]));
    }
    let log2_dim = bytes[5];
    let reserved = le_u16(&bytes[6..8]);
    if reserved != 0 {
        return Err(DecodeError::BadReserved(reserved));
    }
    let nnz = le_u64(&bytes[8..16]);

    let have_triples = (bytes.len() - HEADER_LEN) / TRIPLE_LEN;
    if nnz > have_triples as u64 {
        let needed = nnz
            .saturating_mul(TRIPLE_LEN as u64)
            .saturating_add(HEADER_LEN as u64);
        return Err(DecodeError::Truncated {
            needed: usize::try_from(needed).unwrap_or(usize::MAX),
            have: bytes.len(),
        });
    }
    let nnz = nnz as usize;
    let payload_end = HEADER_LEN + nnz * TRIPLE_LEN;
    if bytes.len() != payload_end {
        return Err(DecodeError::TrailingBytes(bytes.len() - payload_end));
    }

    let mut entries = Vec::with_capacity(nnz);
    for i in 0..nnz {
        let off = HEADER_LEN + i * TRIPLE_LEN;
        entries.push(Entry::new(
            le_u32(&bytes[off..off + 4]),
            le_u32(&bytes[off + 4..off + 8]),
            le_u64(&bytes[off + 8..off + 16]),
        ));
    }
    TrafficMatrix::from_entries(log2_dim, entries).map_err(DecodeError::Matrix)
}

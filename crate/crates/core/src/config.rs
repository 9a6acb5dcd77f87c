//! Window-sizing constants and anonymization settings for one pipeline run.

use alloc::vec::Vec;
use core::fmt;

use crate::matrix::AddressSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigError {
    ZeroNv,
    ZeroNmatPerFile,
    BadLog2Dim(u8),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::ZeroNv => write!(f, "nv (packets per matrix) must be >= 1"),
            ConfigError::ZeroNmatPerFile => write!(f, "nmat_per_file must be >= 1"),
            ConfigError::BadLog2Dim(k) => {
                write!(f, "log2_dim {} out of range (expected 1..=32)", k)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

/// Pipeline constants: packets per window, packets per matrix, matrices per
/// archive, address-space width, and the anonymization key.
///
/// Defaults are the full-scale values (`2^30 / 2^17 / 2^6` over the 32-bit
/// space); desk-scale runs shrink them. Window and archive arithmetic uses
/// ceilings so a short final window is well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChallengeConfig {
    /// Packets per time window.
    pub np_packets: u64,
    /// Packets per matrix.
    pub nv: u64,
    /// Matrices per tar archive.
    pub nmat_per_file: u64,
    /// Address-space width `k`; the matrix is `2^k x 2^k`.
    pub log2_dim: u8,
    /// Key for the anonymizing permutation.
    pub anon_key: u128,
    /// Whether addresses are anonymized at all. Disabling is for the
    /// invariance checks; statistics are identical either way.
    pub anonymize: bool,
    /// Optional (source set, destination set) subranges to mask and analyze.
    pub subranges: Vec<(AddressSet, AddressSet)>,
}

impl Default for ChallengeConfig {
    fn default() -> Self {
        ChallengeConfig {
            np_packets: 1 << 30,
            nv: 1 << 17,
            nmat_per_file: 1 << 6,
            log2_dim: 32,
            anon_key: 0,
            anonymize: true,
            subranges: Vec::new(),
        }
    }
}

impl ChallengeConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.nv == 0 {
            return Err(ConfigError::ZeroNv);
        }
        if self.nmat_per_file == 0 {
            return Err(ConfigError::ZeroNmatPerFile);
        }
        if !(1..=32).contains(&self.log2_dim) {
            return Err(ConfigError::BadLog2Dim(self.log2_dim));
        }
        Ok(())
    }

    /// Address-space extent `2^log2_dim`.
    pub fn dim(&self) -> u64 {
        1u64 << self.log2_dim
    }

    /// Matrices produced per window: `ceil(np_packets / nv)`.
    pub fn matrices_per_window(&self) -> u64 {
        self.np_packets.div_ceil(self.nv)
    }

    /// Archives written per window: `ceil(np_packets / (nv * nmat_per_file))`.
    pub fn archives_per_window(&self) -> u64 {
        self.matrices_per_window().div_ceil(self.nmat_per_file)
    }

    /// Whether the window splits into full matrices and full archives with no
    /// short remainder (always true at the full-scale defaults).
    pub fn is_exact(&self) -> bool {
        self.np_packets % (self.nv * self.nmat_per_file) == 0
    }
}

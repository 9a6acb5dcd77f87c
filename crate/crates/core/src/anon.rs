//! Keyed bijective address anonymization.
//!
//! Addresses are relabeled through a 4-round balanced Feistel permutation
//! keyed by a 128-bit key. On the full 32-bit address space the network is a
//! straight bijection over two 16-bit halves; for narrower spaces the same
//! network runs over two `ceil(k/2)`-bit halves and cycle-walks until the
//! output lands back inside `[0, 2^k)`, so the permutation is closed over the
//! configured space. The mapping is invertible, which the round-trip tests
//! rely on; it makes no cryptographic hardness claim beyond being a keyed
//! pseudorandom permutation for statistics purposes.

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnonError {
    BadLog2Dim(u8),
}

impl fmt::Display for AnonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnonError::BadLog2Dim(k) => {
                write!(f, "log2_dim {} out of range (expected 1..=32)", k)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AnonError {}

/// Keyed permutation on the `[0, 2^log2_dim)` address space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anonymizer {
    round_keys: [u64; 4],
    half_bits: u32,
    half_mask: u32,
    limit: u64,
}

/// splitmix64 finalizer; full-avalanche 64-bit mixer.
fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

impl Anonymizer {
    pub fn new(key: u128, log2_dim: u8) -> Result<Self, AnonError> {
        if !(1..=32).contains(&log2_dim) {
            return Err(AnonError::BadLog2Dim(log2_dim));
        }
        let lo = key as u64;
        let hi = (key >> 64) as u64;
        let mut round_keys = [0u64; 4];
        let mut s = lo ^ mix64(hi);
        for rk in round_keys.iter_mut() {
            s = s.wrapping_add(0x9e37_79b9_7f4a_7c15);
            *rk = mix64(s ^ hi.rotate_left(21));
        }
        let half_bits = (log2_dim as u32 + 1) / 2;
        Ok(Anonymizer {
            round_keys,
            half_bits,
            half_mask: (1u32 << half_bits) - 1,
            limit: 1u64 << log2_dim,
        })
    }

    fn round(&self, half: u32, round_key: u64) -> u32 {
        (mix64(round_key ^ half as u64) as u32) & self.half_mask
    }

    fn forward_once(&self, x: u32) -> u32 {
        let mut left = (x >> self.half_bits) & self.half_mask;
        let mut right = x & self.half_mask;
        for &rk in &self.round_keys {
            let next_right = left ^ self.round(right, rk);
            left = right;
            right = next_right;
        }
        (left << self.half_bits) | right
    }

    fn backward_once(&self, x: u32) -> u32 {
        let mut left = (x >> self.half_bits) & self.half_mask;
        let mut right = x & self.half_mask;
        for &rk in self.round_keys.iter().rev() {
            let prev_left = right ^ self.round(left, rk);
            right = left;
            left = prev_left;
        }
        (left << self.half_bits) | right
    }

    /// Anonymized address for `addr`; `addr` must be inside the space.
    /// Walks the Feistel cycle until the image falls back inside `[0, 2^k)`,
    /// which keeps the map a bijection on the space for odd widths.
    pub fn anonymize(&self, addr: u32) -> u32 {
        debug_assert!((addr as u64) < self.limit);
        let mut x = self.forward_once(addr);
        while x as u64 >= self.limit {
            x = self.forward_once(x);
        }
        x
    }

    /// Inverse of [`Anonymizer::anonymize`].
    pub fn deanonymize(&self, addr: u32) -> u32 {
        debug_assert!((addr as u64) < self.limit);
        let mut x = self.backward_once(addr);
        while x as u64 >= self.limit {
            x = self.backward_once(x);
        }
        x
    }
}

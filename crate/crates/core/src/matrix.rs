//! Hypersparse traffic matrices in canonical sorted coordinate form.
//!
//! A [`TrafficMatrix`] counts packets over a `2^k x 2^k` address space where
//! rows are sources and columns are destinations. Only nonzero counts are
//! stored, as `(row, col, count)` triples sorted by `(row, col)` with no
//! duplicates. Every operation preserves that canonical form, and all
//! arithmetic is exact: counts are `u64` and overflow is a checked error.

use alloc::vec::Vec;
use core::fmt;

/// One stored cell: `count` packets from source `row` to destination `col`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entry {
    pub row: u32,
    pub col: u32,
    pub count: u64,
}

impl Entry {
    pub fn new(row: u32, col: u32, count: u64) -> Self {
        Entry { row, col, count }
    }

    fn key(&self) -> (u32, u32) {
        (self.row, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixError {
    /// `log2_dim` outside the supported `1..=32` range.
    BadLog2Dim(u8),
    /// A pair addressed a cell outside the `2^log2_dim` address space.
    IndexOutOfRange { row: u32, col: u32, log2_dim: u8 },
    /// Two operands live in different address spaces.
    DimMismatch { left: u8, right: u8 },
    /// Entrywise sum exceeded `u64::MAX`.
    CountOverflow { row: u32, col: u32 },
    /// Entry list not sorted by `(row, col)`.
    Unsorted { position: usize },
    /// The same `(row, col)` key stored twice.
    DuplicateKey { row: u32, col: u32 },
    /// An explicit zero count, which canonical form forbids.
    ZeroCount { row: u32, col: u32 },
    /// Address range with `lo > hi`.
    InvertedRange { lo: u32, hi: u32 },
}

impl fmt::Display for MatrixError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixError::BadLog2Dim(k) => {
                write!(f, "log2_dim {} out of range (expected 1..=32)", k)
            }
            MatrixError::IndexOutOfRange { row, col, log2_dim } => write!(
                f,
                "pair ({}, {}) outside the 2^{} address space",
                row, col, log2_dim
            ),
            MatrixError::DimMismatch { left, right } => write!(
                f,
                "address-space mismatch: log2_dim {} vs {}",
                left, right
            ),
            MatrixError::CountOverflow { row, col } => {
                write!(f, "count overflow at ({}, {})", row, col)
            }
            MatrixError::Unsorted { position } => {
                write!(f, "entries out of (row, col) order at position {}", position)
            }
            MatrixError::DuplicateKey { row, col } => {
                write!(f, "duplicate entry for ({}, {})", row, col)
            }
            MatrixError::ZeroCount { row, col } => {
                write!(f, "explicit zero count at ({}, {})", row, col)
            }
            MatrixError::InvertedRange { lo, hi } => {
                write!(f, "inverted address range {}-{}", lo, hi)
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MatrixError {}

/// Hypersparse nonnegative-integer count matrix over a `2^k x 2^k` space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrafficMatrix {
    log2_dim: u8,
    entries: Vec<Entry>,
}

fn check_log2_dim(log2_dim: u8) -> Result<(), MatrixError> {
    if (1..=32).contains(&log2_dim) {
        Ok(())
    } else {
        Err(MatrixError::BadLog2Dim(log2_dim))
    }
}

impl TrafficMatrix {
    /// The all-zero matrix (no stored entries).
    pub fn empty(log2_dim: u8) -> Result<Self, MatrixError> {
        check_log2_dim(log2_dim)?;
        Ok(TrafficMatrix {
            log2_dim,
            entries: Vec::new(),
        })
    }

    /// Tallies `(src, dst)` pairs into a matrix; the count at `(r, c)` is the
    /// multiplicity of `(r, c)` in the input.
    pub fn from_pairs<I>(log2_dim: u8, pairs: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        check_log2_dim(log2_dim)?;
        let dim = 1u64 << log2_dim;
        let mut keys: Vec<(u32, u32)> = Vec::new();
        for (row, col) in pairs {
            if row as u64 >= dim || col as u64 >= dim {
                return Err(MatrixError::IndexOutOfRange { row, col, log2_dim });
            }
            keys.push((row, col));
        }
        keys.sort_unstable();
        let mut entries: Vec<Entry> = Vec::new();
        for (row, col) in keys {
            match entries.last_mut() {
                Some(last) if last.key() == (row, col) => last.count += 1,
                _ => entries.push(Entry::new(row, col, 1)),
            }
        }
        Ok(TrafficMatrix { log2_dim, entries })
    }

    /// Builds a matrix from an entry list that must already be canonical:
    /// strictly sorted by `(row, col)`, in bounds, all counts >= 1.
    /// This is the validating constructor used when decoding stored matrices.
    pub fn from_entries(log2_dim: u8, entries: Vec<Entry>) -> Result<Self, MatrixError> {
        check_log2_dim(log2_dim)?;
        let dim = 1u64 << log2_dim;
        for (i, e) in entries.iter().enumerate() {
            if e.row as u64 >= dim || e.col as u64 >= dim {
                return Err(MatrixError::IndexOutOfRange {
                    row: e.row,
                    col: e.col,
                    log2_dim,
                });
            }
            if e.count == 0 {
                return Err(MatrixError::ZeroCount {
                    row: e.row,
                    col: e.col,
                });
            }
            if i > 0 {
                match entries[i - 1].key().cmp(&e.key()) {
                    core::cmp::Ordering::Less => {}
                    core::cmp::Ordering::Equal => {
                        return Err(MatrixError::DuplicateKey {
                            row: e.row,
                            col: e.col,
                        })
                    }
                    core::cmp::Ordering::Greater => {
                        return Err(MatrixError::Unsorted { position: i })
                    }
                }
            }
        }
        Ok(TrafficMatrix { log2_dim, entries })
    }

    pub fn log2_dim(&self) -> u8 {
        self.log2_dim
    }

    /// Address-space extent `2^log2_dim`.
    pub fn dim(&self) -> u64 {
        1u64 << self.log2_dim
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> u64 {
        self.entries.len() as u64
    }

    /// Sum of all stored counts.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Largest stored count, 0 for the empty matrix.
    pub fn max_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).max().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Entrywise sum of two matrices over the same address space.
    pub fn add(&self, other: &TrafficMatrix) -> Result<TrafficMatrix, MatrixError> {
        if self.log2_dim != other.log2_dim {
            return Err(MatrixError::DimMismatch {
                left: self.log2_dim,
                right: other.log2_dim,
            });
        }
        let merged = merge_sum(&self.entries, &other.entries)?;
        Ok(TrafficMatrix {
            log2_dim: self.log2_dim,
            entries: merged,
        })
    }

    /// In-place form of [`TrafficMatrix::add`] for accumulation loops.
    pub fn add_assign(&mut self, other: &TrafficMatrix) -> Result<(), MatrixError> {
        if self.log2_dim != other.log2_dim {
            return Err(MatrixError::DimMismatch {
                left: self.log2_dim,
                right: other.log2_dim,
            });
        }
        if other.entries.is_empty() {
            return Ok(());
        }
        if self.entries.is_empty() {
            self.entries = other.entries.clone();
            return Ok(());
        }
        self.entries = merge_sum(&self.entries, &other.entries)?;
        Ok(())
    }

    /// Per-row sum of counts, over nonzero rows only, sorted by row.
    pub fn row_reduce(&self) -> Vec<(u32, u64)> {
        let mut out: Vec<(u32, u64)> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some((row, sum)) if *row == e.row => *sum += e.count,
                _ => out.push((e.row, e.count)),
            }
        }
        out
    }

    /// Per-column sum of counts, over nonzero columns only, sorted by column.
    pub fn col_reduce(&self) -> Vec<(u32, u64)> {
        col_aggregate(&self.entries, |e| e.count)
    }

    /// Per-row count of distinct destinations (fan-out), sorted by row.
    pub fn row_degree(&self) -> Vec<(u32, u64)> {
        let mut out: Vec<(u32, u64)> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some((row, deg)) if *row == e.row => *deg += 1,
                _ => out.push((e.row, 1)),
            }
        }
        out
    }

    /// Per-column count of distinct sources (fan-in), sorted by column.
    pub fn col_degree(&self) -> Vec<(u32, u64)> {
        col_aggregate(&self.entries, |_| 1)
    }

    /// Keeps exactly the entries with `row` in `src` and `col` in `dst`,
    /// counts unchanged. Equivalent to the diagonal-mask product
    /// `D_src * A * D_dst` with 0/1 diagonal matrices.
    pub fn diag_mask(&self, src: &AddressSet, dst: &AddressSet) -> TrafficMatrix {
        let entries = self
            .entries
            .iter()
            .filter(|e| src.contains(e.row) && dst.contains(e.col))
            .copied()
            .collect();
        TrafficMatrix {
            log2_dim: self.log2_dim,
            entries,
        }
    }

    /// Re-checks every canonical-form invariant. Operations uphold these by
    /// construction; this exists so tests and decoders can assert it.
    pub fn check_canonical(&self) -> Result<(), MatrixError> {
        Self::from_entries(self.log2_dim, self.entries.clone()).map(|_| ())
    }
}

/// Linear two-pointer merge of two canonical entry lists, summing counts on
/// matching keys. Overflow is reported, never wrapped.
fn merge_sum(a: &[Entry], b: &[Entry]) -> Result<Vec<Entry>, MatrixError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ea, eb) = (a[i], b[j]);
        match ea.key().cmp(&eb.key()) {
            core::cmp::Ordering::Less => {
                out.push(ea);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(eb);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                let count = ea.count.checked_add(eb.count).ok_or(
                    MatrixError::CountOverflow {
                        row: ea.row,
                        col: ea.col,
                    },
                )?;
                out.push(Entry::new(ea.row, ea.col, count));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Ok(out)
}

/// Column aggregation for row-major-sorted entries. Columns arrive out of
/// order, so this sorts a scratch list of (col, contribution) pairs.
fn col_aggregate<F>(entries: &[Entry], contribution: F) -> Vec<(u32, u64)>
where
    F: Fn(&Entry) -> u64,
{
    let mut scratch: Vec<(u32, u64)> = entries.iter().map(|e| (e.col, contribution(e))).collect();
    scratch.sort_unstable_by_key(|&(col, _)| col);
    let mut out: Vec<(u32, u64)> = Vec::new();
    for (col, v) in scratch {
        match out.last_mut() {
            Some((c, sum)) if *c == col => *sum += v,
            _ => out.push((col, v)),
        }
    }
    out
}

/// A set of address indices used to mask matrix rows or columns: either a
/// contiguous inclusive range or an explicit sorted list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AddressSet {
    Range { lo: u32, hi: u32 },
    List(Vec<u32>),
}

impl AddressSet {
    /// Inclusive range `lo..=hi`.
    pub fn range(lo: u32, hi: u32) -> Result<Self, MatrixError> {
        if lo > hi {
            return Err(MatrixError::InvertedRange { lo, hi });
        }
        Ok(AddressSet::Range { lo, hi })
    }

    /// Explicit index list; sorted and deduplicated on construction.
    pub fn list<I: IntoIterator<Item = u32>>(indices: I) -> Self {
        let mut v: Vec<u32> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        AddressSet::List(v)
    }

    /// The whole `2^log2_dim` address space.
    pub fn full(log2_dim: u8) -> Self {
        let hi = if log2_dim >= 32 {
            u32::MAX
        } else {
            (1u32 << log2_dim) - 1
        };
        AddressSet::Range { lo: 0, hi }
    }

    pub fn contains(&self, index: u32) -> bool {
        match self {
            AddressSet::Range { lo, hi } => (*lo..=*hi).contains(&index),
            AddressSet::List(v) => v.binary_search(&index).is_ok(),
        }
    }
}

impl fmt::Display for AddressSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AddressSet::Range { lo, hi } => write!(f, "{}-{}", lo, hi),
            AddressSet::List(v) => {
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", x)?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(log2_dim: u8, entries: &[(u32, u32, u64)]) -> TrafficMatrix {
        TrafficMatrix::from_entries(
            log2_dim,
            entries.iter().map(|&(r, c, n)| Entry::new(r, c, n)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn from_pairs_empty() {
        let a = TrafficMatrix::from_pairs(8, []).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a.total_count(), 0);
        assert_eq!(a.max_count(), 0);
    }

    #[test]
    fn from_pairs_counts_multiplicity() {
        let a = TrafficMatrix::from_pairs(2, [(1, 2), (1, 2), (3, 0)]).unwrap();
        assert_eq!(a.entries(), &[Entry::new(1, 2, 2), Entry::new(3, 0, 1)]);
        assert_eq!(a.total_count(), 3);
    }

    #[test]
    fn from_pairs_rejects_out_of_range() {
        let err = TrafficMatrix::from_pairs(2, [(1, 2), (4, 0)]).unwrap_err();
        assert_eq!(
            err,
            MatrixError::IndexOutOfRange {
                row: 4,
                col: 0,
                log2_dim: 2
            }
        );
    }

    #[test]
    fn bad_log2_dim_rejected() {
        assert!(TrafficMatrix::empty(0).is_err());
        assert!(TrafficMatrix::empty(33).is_err());
        assert!(TrafficMatrix::empty(32).is_ok());
    }

    #[test]
    fn add_identity() {
        let a = m(4, &[(1, 2, 2), (3, 0, 1)]);
        let sum = a.add(&TrafficMatrix::empty(4).unwrap()).unwrap();
        assert_eq!(sum, a);
    }

    #[test]
    fn add_merges_keys() {
        let a = m(4, &[(0, 0, 1)]);
        let b = m(4, &[(0, 0, 2), (1, 1, 5)]);
        let sum = a.add(&b).unwrap();
        assert_eq!(sum.entries(), &[Entry::new(0, 0, 3), Entry::new(1, 1, 5)]);
        assert_eq!(sum.total_count(), a.total_count() + b.total_count());
        assert_eq!(sum.nnz(), 2);
    }

    #[test]
    fn add_dim_mismatch() {
        let a = TrafficMatrix::empty(4).unwrap();
        let b = TrafficMatrix::empty(5).unwrap();
        assert_eq!(
            a.add(&b).unwrap_err(),
            MatrixError::DimMismatch { left: 4, right: 5 }
        );
    }

    #[test]
    fn add_overflow_is_checked() {
        let a = m(4, &[(2, 2, u64::MAX)]);
        let b = m(4, &[(2, 2, 1)]);
        assert_eq!(
            a.add(&b).unwrap_err(),
            MatrixError::CountOverflow { row: 2, col: 2 }
        );
    }

    #[test]
    fn add_assign_matches_add() {
        let m1 = m(4, &[(0, 1, 1), (2, 2, 4)]);
        let m2 = m(4, &[(0, 1, 2)]);
        let m3 = m(4, &[(5, 5, 7)]);
        let chained = m1.add(&m2).unwrap().add(&m3).unwrap();
        let mut acc = TrafficMatrix::empty(4).unwrap();
        for x in [&m1, &m2, &m3] {
            acc.add_assign(x).unwrap();
        }
        assert_eq!(acc, chained);
    }

    #[test]
    fn add_assign_empty_onto_empty() {
        let mut acc = TrafficMatrix::empty(4).unwrap();
        for _ in 0..4 {
            let e = TrafficMatrix::empty(4).unwrap();
            acc.add_assign(&e).unwrap();
        }
        assert!(acc.is_empty());
    }

    #[test]
    fn reductions_small() {
        let a = m(4, &[(1, 0, 1), (1, 2, 2), (3, 0, 1)]);
        assert_eq!(a.row_reduce(), vec![(1, 3), (3, 1)]);
        assert_eq!(a.col_reduce(), vec![(0, 2), (2, 2)]);
        assert_eq!(a.row_degree(), vec![(1, 2), (3, 1)]);
        assert_eq!(a.col_degree(), vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn reductions_empty() {
        let a = TrafficMatrix::empty(4).unwrap();
        assert!(a.row_reduce().is_empty());
        assert!(a.col_reduce().is_empty());
        assert!(a.row_degree().is_empty());
        assert!(a.col_degree().is_empty());
    }

    #[test]
    fn degree_single_entry() {
        let a = m(4, &[(7, 7, 9)]);
        assert_eq!(a.row_degree(), vec![(7, 1)]);
        assert_eq!(a.col_degree(), vec![(7, 1)]);
    }

    #[test]
    fn diag_mask_identity_and_select() {
        let a = m(4, &[(1, 2, 2), (3, 0, 1)]);
        let full = AddressSet::full(4);
        assert_eq!(a.diag_mask(&full, &full), a);

        let src = AddressSet::list([1]);
        let masked = a.diag_mask(&src, &full);
        assert_eq!(masked.entries(), &[Entry::new(1, 2, 2)]);
    }

    #[test]
    fn diag_mask_empty_selection() {
        let a = m(4, &[(1, 2, 2)]);
        let none = AddressSet::list([]);
        assert!(a.diag_mask(&none, &AddressSet::full(4)).is_empty());
    }

    #[test]
    fn from_entries_validates() {
        let unsorted = vec![Entry::new(2, 0, 1), Entry::new(1, 0, 1)];
        assert_eq!(
            TrafficMatrix::from_entries(4, unsorted).unwrap_err(),
            MatrixError::Unsorted { position: 1 }
        );
        let dup = vec![Entry::new(1, 0, 1), Entry::new(1, 0, 2)];
        assert_eq!(
            TrafficMatrix::from_entries(4, dup).unwrap_err(),
            MatrixError::DuplicateKey { row: 1, col: 0 }
        );
        let zero = vec![Entry::new(1, 0, 0)];
        assert_eq!(
            TrafficMatrix::from_entries(4, zero).unwrap_err(),
            MatrixError::ZeroCount { row: 1, col: 0 }
        );
    }

    #[test]
    fn address_set_semantics() {
        let r = AddressSet::range(3, 5).unwrap();
        assert!(!r.contains(2) && r.contains(3) && r.contains(5) && !r.contains(6));
        assert!(AddressSet::range(5, 3).is_err());

        let l = AddressSet::list([9, 1, 5, 1]);
        assert_eq!(l, AddressSet::List(vec![1, 5, 9]));
        assert!(l.contains(5) && !l.contains(2));

        let full = AddressSet::full(32);
        assert!(full.contains(u32::MAX));
    }
}

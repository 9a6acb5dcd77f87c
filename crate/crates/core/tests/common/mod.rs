//! Dense reference implementation and matrix generators shared by the
//! integration tests. The dense path never touches the sparse kernel's merge
//! or reduction code: it tallies into a full 2^k x 2^k array and reads
//! results straight out of it.

#![allow(dead_code)]

use hypertm_core::{AddressSet, Entry, NetworkStats, TrafficMatrix};
use rand::Rng;

/// Dense 2D reference array over a small address space (k <= 8).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DenseMatrix {
    pub n: usize,
    pub cells: Vec<u64>,
}

impl DenseMatrix {
    pub fn zero(log2_dim: u8) -> Self {
        assert!(log2_dim <= 8, "dense oracle is for desk-scale spaces");
        let n = 1usize << log2_dim;
        DenseMatrix {
            n,
            cells: vec![0; n * n],
        }
    }

    pub fn from_pairs(log2_dim: u8, pairs: &[(u32, u32)]) -> Self {
        let mut d = DenseMatrix::zero(log2_dim);
        for &(r, c) in pairs {
            d.cells[r as usize * d.n + c as usize] += 1;
        }
        d
    }

    pub fn from_sparse(m: &TrafficMatrix) -> Self {
        let mut d = DenseMatrix::zero(m.log2_dim());
        for e in m.entries() {
            d.cells[e.row as usize * d.n + e.col as usize] += e.count;
        }
        d
    }

    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.cells[r * self.n + c]
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n);
        DenseMatrix {
            n: self.n,
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn total_count(&self) -> u64 {
        self.cells.iter().sum()
    }

    pub fn nnz(&self) -> u64 {
        self.cells.iter().filter(|&&v| v != 0).count() as u64
    }

    pub fn max_count(&self) -> u64 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    pub fn row_reduce(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for r in 0..self.n {
            let s: u64 = (0..self.n).map(|c| self.at(r, c)).sum();
            if s != 0 {
                out.push((r as u32, s));
            }
        }
        out
    }

    pub fn col_reduce(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for c in 0..self.n {
            let s: u64 = (0..self.n).map(|r| self.at(r, c)).sum();
            if s != 0 {
                out.push((c as u32, s));
            }
        }
        out
    }

    pub fn row_degree(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for r in 0..self.n {
            let d = (0..self.n).filter(|&c| self.at(r, c) != 0).count() as u64;
            if d != 0 {
                out.push((r as u32, d));
            }
        }
        out
    }

    pub fn col_degree(&self) -> Vec<(u32, u64)> {
        let mut out = Vec::new();
        for c in 0..self.n {
            let d = (0..self.n).filter(|&r| self.at(r, c) != 0).count() as u64;
            if d != 0 {
                out.push((c as u32, d));
            }
        }
        out
    }

    /// Subrange selection as a plain cell filter.
    pub fn mask_filter(&self, src: &AddressSet, dst: &AddressSet) -> DenseMatrix {
        let mut out = DenseMatrix {
            n: self.n,
            cells: vec![0; self.n * self.n],
        };
        for r in 0..self.n {
            for c in 0..self.n {
                if src.contains(r as u32) && dst.contains(c as u32) {
                    out.cells[r * self.n + c] = self.at(r, c);
                }
            }
        }
        out
    }

    /// Subrange selection as the literal `D_src * A * D_dst` triple product
    /// with 0/1 diagonal matrices. Cubic, so keep the space small.
    pub fn mask_triple_product(&self, src: &AddressSet, dst: &AddressSet) -> DenseMatrix {
        let n = self.n;
        let d_src = diag(n, src);
        let d_dst = diag(n, dst);
        let da = mat_mul(&d_src, &self.cells, n);
        let dad = mat_mul(&da, &d_dst, n);
        DenseMatrix { n, cells: dad }
    }

    /// The nine statistics read straight off the dense array.
    pub fn analyze(&self) -> NetworkStats {
        let rows = self.row_reduce();
        let cols = self.col_reduce();
        let rdeg = self.row_degree();
        let cdeg = self.col_degree();
        NetworkStats {
            valid_packets: self.total_count(),
            unique_links: self.nnz(),
            max_link_packets: self.max_count(),
            unique_sources: rows.len() as u64,
            max_source_packets: rows.iter().map(|&(_, v)| v).max().unwrap_or(0),
            max_source_fanout: rdeg.iter().map(|&(_, v)| v).max().unwrap_or(0),
            unique_destinations: cols.len() as u64,
            max_dest_packets: cols.iter().map(|&(_, v)| v).max().unwrap_or(0),
            max_dest_fanin: cdeg.iter().map(|&(_, v)| v).max().unwrap_or(0),
        }
    }

    /// Canonical sparse form of this dense array, built independently of the
    /// kernel's own constructors' coalescing (cells are already unique).
    pub fn to_entries(&self) -> Vec<Entry> {
        let mut out = Vec::new();
        for r in 0..self.n {
            for c in 0..self.n {
                let v = self.at(r, c);
                if v != 0 {
                    out.push(Entry::new(r as u32, c as u32, v));
                }
            }
        }
        out
    }
}

fn diag(n: usize, set: &AddressSet) -> Vec<u64> {
    let mut d = vec![0u64; n * n];
    for i in 0..n {
        if set.contains(i as u32) {
            d[i * n + i] = 1;
        }
    }
    d
}

fn mat_mul(a: &[u64], b: &[u64], n: usize) -> Vec<u64> {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}

/// Random matrix over a 2^k space with up to `max_pairs` tallied pairs; pair
/// collisions give counts above 1.
pub fn random_matrix<R: Rng>(rng: &mut R, log2_dim: u8, max_pairs: usize) -> TrafficMatrix {
    let n = 1u32 << log2_dim;
    let n_pairs = rng.gen_range(0..=max_pairs);
    let pairs: Vec<(u32, u32)> = (0..n_pairs)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect();
    TrafficMatrix::from_pairs(log2_dim, pairs).unwrap()
}

/// Random address set: a contiguous range or an explicit list.
pub fn random_address_set<R: Rng>(rng: &mut R, log2_dim: u8) -> AddressSet {
    let n = 1u32 << log2_dim;
    if rng.gen_bool(0.5) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        AddressSet::range(a.min(b), a.max(b)).unwrap()
    } else {
        let len = rng.gen_range(0..=(n as usize).min(64));
        AddressSet::list((0..len).map(|_| rng.gen_range(0..n)))
    }
}

//! Map-based index ownership: a processor grid, a per-dimension distribution,
//! and a processor list, queried for the global indices each processor owns.
//!
//! Ownership is a pure function of the map and the array shape, so every
//! process can compute identical partitions independently, with no
//! communication. For any extent the per-processor index sets are pairwise
//! disjoint and cover `0..extent` exactly; extents smaller than the processor
//! count simply leave some processors with nothing.

use alloc::vec::Vec;
use core::fmt;

/// How one array dimension is split across its grid dimension.
///
/// `Block` hands out one contiguous run per processor using a
/// ceil(extent/procs) block, `Cyclic` deals single indices round-robin, and
/// `BlockCyclic(b)` deals fixed-size blocks of `b` round-robin. `Block` is
/// `BlockCyclic(ceil(extent/procs))` and `Cyclic` is `BlockCyclic(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    Block,
    Cyclic,
    BlockCyclic(usize),
    /// Recognized but unsupported; construction rejects it.
    BlockOverlap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DmapError {
    EmptyGrid,
    ZeroGridDim { dim: usize },
    DistRankMismatch { grid: usize, dist: usize },
    ProcCountMismatch { expected: usize, actual: usize },
    DuplicatePid(usize),
    ZeroBlockSize { dim: usize },
    BlockOverlapUnsupported,
    UnknownPid(usize),
    BadDim { dim: usize, rank: usize },
    ShapeRankMismatch { grid: usize, shape: usize },
    IndexOutOfRange { index: usize, extent: usize },
    /// `owner` is only defined when every other grid dimension has size 1.
    AmbiguousOwner { dim: usize },
}

impl fmt::Display for DmapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DmapError::EmptyGrid => write!(f, "processor grid has no dimensions"),
            DmapError::ZeroGridDim { dim } => write!(f, "grid dimension {} is zero", dim),
            DmapError::DistRankMismatch { grid, dist } => {
                write!(f, "{} grid dimensions but {} distributions", grid, dist)
            }
            DmapError::ProcCountMismatch { expected, actual } => {
                write!(f, "grid wants {} processors, got {}", expected, actual)
            }
            DmapError::DuplicatePid(pid) => write!(f, "processor id {} listed twice", pid),
            DmapError::ZeroBlockSize { dim } => {
                write!(f, "block-cyclic block size 0 in dimension {}", dim)
            }
            DmapError::BlockOverlapUnsupported => {
                write!(f, "block-overlap distribution is not supported")
            }
            DmapError::UnknownPid(pid) => write!(f, "processor id {} is not in the map", pid),
            DmapError::BadDim { dim, rank } => {
                write!(f, "dimension {} out of range for rank {}", dim, rank)
            }
            DmapError::ShapeRankMismatch { grid, shape } => {
                write!(f, "map rank {} but shape rank {}", grid, shape)
            }
            DmapError::IndexOutOfRange { index, extent } => {
                write!(f, "index {} outside extent {}", index, extent)
            }
            DmapError::AmbiguousOwner { dim } => write!(
                f,
                "owner along dimension {} is ambiguous: other grid dimensions are larger than 1",
                dim
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DmapError {}

/// Processor grid + distribution + processor list.
///
/// Processor ids may be any distinct integers; a processor's grid coordinate
/// is its position in the list, unraveled over the grid with the last
/// dimension varying fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dmap {
    grid: Vec<usize>,
    dist: Vec<Dist>,
    procs: Vec<usize>,
}

impl Dmap {
    pub fn new(grid: Vec<usize>, dist: Vec<Dist>, procs: Vec<usize>) -> Result<Self, DmapError> {
        if grid.is_empty() {
            return Err(DmapError::EmptyGrid);
        }
        for (dim, &g) in grid.iter().enumerate() {
            if g == 0 {
                return Err(DmapError::ZeroGridDim { dim });
            }
        }
        if dist.len() != grid.len() {
            return Err(DmapError::DistRankMismatch {
                grid: grid.len(),
                dist: dist.len(),
            });
        }
        for (dim, d) in dist.iter().enumerate() {
            match d {
                Dist::BlockCyclic(0) => return Err(DmapError::ZeroBlockSize { dim }),
                Dist::BlockOverlap => return Err(DmapError::BlockOverlapUnsupported),
                _ => {}
            }
        }
        let expected: usize = grid.iter().product();
        if procs.len() != expected {
            return Err(DmapError::ProcCountMismatch {
                expected,
                actual: procs.len(),
            });
        }
        let mut seen = procs.clone();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(DmapError::DuplicatePid(w[0]));
            }
        }
        Ok(Dmap { grid, dist, procs })
    }

    /// The 1-D row map of the parallel drivers: an `[n_procs, 1]` grid over
    /// processors `0..n_procs` with the given row distribution.
    pub fn rows(n_procs: usize, dist: Dist) -> Result<Self, DmapError> {
        Dmap::new(
            alloc::vec![n_procs, 1],
            alloc::vec![dist, Dist::Block],
            (0..n_procs).collect(),
        )
    }

    pub fn grid(&self) -> &[usize] {
        &self.grid
    }

    pub fn dist(&self) -> &[Dist] {
        &self.dist
    }

    pub fn procs(&self) -> &[usize] {
        &self.procs
    }

    pub fn rank(&self) -> usize {
        self.grid.len()
    }

    fn position_of(&self, pid: usize) -> Result<usize, DmapError> {
        self.procs
            .iter()
            .position(|&p| p == pid)
            .ok_or(DmapError::UnknownPid(pid))
    }

    /// Grid coordinate of `pid` along `dim` (last dimension fastest).
    fn coord(&self, position: usize, dim: usize) -> usize {
        let stride: usize = self.grid[dim + 1..].iter().product();
        (position / stride) % self.grid[dim]
    }

    fn check_query(&self, shape: &[usize], dim: usize) -> Result<(), DmapError> {
        if shape.len() != self.grid.len() {
            return Err(DmapError::ShapeRankMismatch {
                grid: self.grid.len(),
                shape: shape.len(),
            });
        }
        if dim >= self.grid.len() {
            return Err(DmapError::BadDim {
                dim,
                rank: self.grid.len(),
            });
        }
        Ok(())
    }

    /// Effective block size along `dim` for extent `n`: the distribution
    /// reduced to its block-cyclic equivalent.
    fn block_size(&self, dim: usize, n: usize) -> usize {
        let p = self.grid[dim];
        match self.dist[dim] {
            Dist::Block => n.div_ceil(p).max(1),
            Dist::Cyclic => 1,
            Dist::BlockCyclic(b) => b,
            Dist::BlockOverlap => unreachable!("rejected at construction"),
        }
    }

    /// The sorted global indices along `dim` of a `shape` array owned by
    /// `pid`. Over all processors the results partition `0..shape[dim]`.
    pub fn global_ind(
        &self,
        shape: &[usize],
        dim: usize,
        pid: usize,
    ) -> Result<Vec<usize>, DmapError> {
        self.check_query(shape, dim)?;
        let position = self.position_of(pid)?;
        let g = self.coord(position, dim);
        let n = shape[dim];
        let p = self.grid[dim];
        let b = self.block_size(dim, n);
        let mut out = Vec::new();
        let mut start = g * b;
        while start < n {
            let end = (start + b).min(n);
            out.extend(start..end);
            start += p * b;
        }
        Ok(out)
    }

    /// The unique processor whose [`Dmap::global_ind`] along `dim` contains
    /// `index`. Defined only when every other grid dimension has size 1.
    pub fn owner(&self, shape: &[usize], dim: usize, index: usize) -> Result<usize, DmapError> {
        self.check_query(shape, dim)?;
        let others: usize = self
            .grid
            .iter()
            .enumerate()
            .filter(|&(d, _)| d != dim)
            .map(|(_, &g)| g)
            .product();
        if others != 1 {
            return Err(DmapError::AmbiguousOwner { dim });
        }
        let n = shape[dim];
        if index >= n {
            return Err(DmapError::IndexOutOfRange { index, extent: n });
        }
        let p = self.grid[dim];
        let b = self.block_size(dim, n);
        let g = (index / b) % p;
        // coordinate along dim maps back to a list position: with all other
        // dims of size 1 the position is the coordinate times its stride
        let stride: usize = self.grid[dim + 1..].iter().product();
        Ok(self.procs[g * stride])
    }
}

//! The nine aggregate network statistics of a traffic matrix.
//!
//! One pass over the canonical entry list produces everything: the link-level
//! counts fall out directly, row aggregates stream in sorted order, and
//! column aggregates accumulate in a tree keyed by destination. Subrange
//! analysis masks first and then reuses the very same function; there is no
//! separate subrange code path.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::matrix::{AddressSet, TrafficMatrix};

/// Nine aggregate properties of one traffic matrix, all exact integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NetworkStats {
    /// Total packets (sum of all counts).
    pub valid_packets: u64,
    /// Distinct (source, destination) pairs (stored entries).
    pub unique_links: u64,
    /// Largest single-link packet count.
    pub max_link_packets: u64,
    /// Distinct sources (nonzero rows).
    pub unique_sources: u64,
    /// Largest per-source packet total.
    pub max_source_packets: u64,
    /// Largest per-source count of distinct destinations.
    pub max_source_fanout: u64,
    /// Distinct destinations (nonzero columns).
    pub unique_destinations: u64,
    /// Largest per-destination packet total.
    pub max_dest_packets: u64,
    /// Largest per-destination count of distinct sources.
    pub max_dest_fanin: u64,
}

/// Field names in canonical output order.
pub const STAT_FIELDS: [&str; 9] = [
    "valid_packets",
    "unique_links",
    "max_link_packets",
    "unique_sources",
    "max_source_packets",
    "max_source_fanout",
    "unique_destinations",
    "max_dest_packets",
    "max_dest_fanin",
];

impl NetworkStats {
    /// Field values in the same order as [`STAT_FIELDS`].
    pub fn values(&self) -> [u64; 9] {
        [
            self.valid_packets,
            self.unique_links,
            self.max_link_packets,
            self.unique_sources,
            self.max_source_packets,
            self.max_source_fanout,
            self.unique_destinations,
            self.max_dest_packets,
            self.max_dest_fanin,
        ]
    }

    /// Checks the arithmetic relations every record must satisfy; returns the
    /// first violated relation by name.
    pub fn check_invariants(&self) -> Result<(), &'static str> {
        let s = self;
        if s.unique_links > s.valid_packets {
            return Err("unique_links <= valid_packets");
        }
        if s.max_link_packets > s.max_source_packets {
            return Err("max_link_packets <= max_source_packets");
        }
        if s.max_source_packets > s.valid_packets {
            return Err("max_source_packets <= valid_packets");
        }
        if s.max_link_packets > s.max_dest_packets {
            return Err("max_link_packets <= max_dest_packets");
        }
        if s.max_dest_packets > s.valid_packets {
            return Err("max_dest_packets <= valid_packets");
        }
        if s.max_source_fanout > s.unique_destinations {
            return Err("max_source_fanout <= unique_destinations");
        }
        if s.max_dest_fanin > s.unique_sources {
            return Err("max_dest_fanin <= unique_sources");
        }
        let all_zero = s.values().iter().all(|&v| v == 0);
        if (s.valid_packets == 0) != all_zero {
            return Err("valid_packets = 0 iff all nine are 0");
        }
        Ok(())
    }
}

/// Computes all nine statistics of `matrix` in one pass over its entries.
pub fn analyze(matrix: &TrafficMatrix) -> NetworkStats {
    let mut stats = NetworkStats::default();
    let mut cols: BTreeMap<u32, (u64, u64)> = BTreeMap::new();

    let mut current_row: Option<u32> = None;
    let mut row_sum = 0u64;
    let mut row_deg = 0u64;
    let close_row = |stats: &mut NetworkStats, row_sum: u64, row_deg: u64| {
        stats.unique_sources += 1;
        stats.max_source_packets = stats.max_source_packets.max(row_sum);
        stats.max_source_fanout = stats.max_source_fanout.max(row_deg);
    };

    for e in matrix.entries() {
        stats.valid_packets += e.count;
        stats.unique_links += 1;
        stats.max_link_packets = stats.max_link_packets.max(e.count);

        if current_row != Some(e.row) {
            if current_row.is_some() {
                close_row(&mut stats, row_sum, row_deg);
            }
            current_row = Some(e.row);
            row_sum = 0;
            row_deg = 0;
        }
        row_sum += e.count;
        row_deg += 1;

        let col = cols.entry(e.col).or_insert((0, 0));
        col.0 += e.count;
        col.1 += 1;
    }
    if current_row.is_some() {
        close_row(&mut stats, row_sum, row_deg);
    }

    stats.unique_destinations = cols.len() as u64;
    for (sum, deg) in cols.values() {
        stats.max_dest_packets = stats.max_dest_packets.max(*sum);
        stats.max_dest_fanin = stats.max_dest_fanin.max(*deg);
    }
    stats
}

/// Masks the aggregate matrix per subrange and analyzes each with the same
/// function used for the full matrix.
pub fn subrange_analyze(
    matrix: &TrafficMatrix,
    subranges: &[(AddressSet, AddressSet)],
) -> Vec<NetworkStats> {
    subranges
        .iter()
        .map(|(src, dst)| analyze(&matrix.diag_mask(src, dst)))
        .collect()
}

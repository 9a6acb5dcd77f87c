//! Hypersparse traffic-matrix kernel and the pure-math pieces of the
//! network-sensing pipeline: exact integer count matrices over a `2^k x 2^k`
//! address space, the nine aggregate network statistics, a keyed bijective
//! address anonymizer, window chunking, and map-based index ownership for
//! communication-free work splitting.
//!
//! Everything here is deterministic integer arithmetic on owned values; no
//! I/O, no floats, no global state. The crate is `no_std`-compatible (with
//! `alloc`); file formats and drivers live in the companion `hypertm` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod anon;
pub mod config;
pub mod dmap;
pub mod matrix;
pub mod stats;
pub mod window;

pub use anon::Anonymizer;
pub use config::{ChallengeConfig, ConfigError};
pub use dmap::{Dist, Dmap, DmapError};
pub use matrix::{AddressSet, Entry, MatrixError, TrafficMatrix};
pub use stats::{analyze, subrange_analyze, NetworkStats, STAT_FIELDS};
pub use window::{build_window, PacketRecord};

//! File formats, drivers, and the benchmark harness around the
//! `hypertm-core` kernel: `.htmx` serialization, tar archiving, synthetic
//! trace generation, the window read/sum/analyze pipeline, and scaling
//! reports. The `hypertm` binary is a thin CLI over these modules.

pub mod archive;
pub mod bench;
pub mod config_file;
pub mod gen;
pub mod pipeline;
pub mod report;
pub mod store;

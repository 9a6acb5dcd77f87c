//! Scaling aggregation over bench records: throughput, speedup, and
//! efficiency per (n_procs, n_threads) configuration, emitted as a text
//! table, a CSV, and a self-contained plot script.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bench::{BenchRecord, Phase};

#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub n_procs: usize,
    pub n_threads: usize,
    /// Windows processed (one sum-phase record each).
    pub windows: usize,
    pub packets: u64,
    /// Wall-clock estimate: the busiest worker's total across phases.
    pub makespan_seconds: f64,
    pub throughput_pps: f64,
    pub mean_read_seconds: f64,
    pub mean_sum_seconds: f64,
    pub mean_analyze_seconds: f64,
    pub speedup: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub rows: Vec<ScalingRow>,
    /// (baseline n_procs, baseline n_threads) the ratios are relative to.
    pub baseline: (usize, usize),
    pub mean_sum_seconds: f64,
    pub mean_analyze_seconds: f64,
}

impl Report {
    pub fn sum_slower_than_analyze(&self) -> bool {
        self.mean_sum_seconds > self.mean_analyze_seconds
    }
}

#[derive(Debug)]
pub enum ReportError {
    NoRecords,
}

impl std::fmt::Display for ReportError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReportError::NoRecords => write!(f, "no bench records to report on"),
        }
    }
}

impl std::error::Error for ReportError {}

struct Group {
    packets: u64,
    windows: usize,
    per_pid_wall: BTreeMap<usize, f64>,
    phase_wall: BTreeMap<&'static str, (f64, usize)>,
}

/// Aggregates records into per-(n_procs, n_threads) scaling rows. Speedup is
/// the throughput ratio against the baseline configuration — the (1,1) group
/// when present, otherwise the smallest one — and efficiency divides that by
/// the resource ratio.
pub fn build_report(records: &[BenchRecord]) -> Result<Report, ReportError> {
    if records.is_empty() {
        return Err(ReportError::NoRecords);
    }
    let mut groups: BTreeMap<(usize, usize), Group> = BTreeMap::new();
    let mut sum_wall = (0.0f64, 0usize);
    let mut analyze_wall = (0.0f64, 0usize);
    for r in records {
        let g = groups.entry((r.n_procs, r.n_threads)).or_insert(Group {
            packets: 0,
            windows: 0,
            per_pid_wall: BTreeMap::new(),
            phase_wall: BTreeMap::new(),
        });
        *g.per_pid_wall.entry(r.pid).or_insert(0.0) += r.wall_seconds;
        let phase = g.phase_wall.entry(r.phase.as_str()).or_insert((0.0, 0));
        phase.0 += r.wall_seconds;
        phase.1 += 1;
        if r.phase == Phase::Sum {
            g.packets += r.packets_processed;
            g.windows += 1;
            sum_wall.0 += r.wall_seconds;
            sum_wall.1 += 1;
        }
        if r.phase == Phase::Analyze {
            analyze_wall.0 += r.wall_seconds;
            analyze_wall.1 += 1;
        }
    }

    let mean = |(total, n): (f64, usize)| if n == 0 { 0.0 } else { total / n as f64 };
    let throughput = |g: &Group| {
        let makespan = g
            .per_pid_wall
            .values()
            .cloned()
            .fold(0.0f64, f64::max)
            .max(1e-12);
        (makespan, g.packets as f64 / makespan)
    };

    let baseline_key = if groups.contains_key(&(1, 1)) {
        (1, 1)
    } else {
        *groups.keys().next().unwrap()
    };
    let (_, baseline_pps) = throughput(&groups[&baseline_key]);
    let baseline_resources = (baseline_key.0 * baseline_key.1) as f64;

    let rows = groups
        .iter()
        .map(|(&(n_procs, n_threads), g)| {
            let (makespan, pps) = throughput(g);
            let speedup = pps / baseline_pps;
            let resources = (n_procs * n_threads) as f64;
            ScalingRow {
                n_procs,
                n_threads,
                windows: g.windows,
                packets: g.packets,
                makespan_seconds: makespan,
                throughput_pps: pps,
                mean_read_seconds: mean(*g.phase_wall.get("read").unwrap_or(&(0.0, 0))),
                mean_sum_seconds: mean(*g.phase_wall.get("sum").unwrap_or(&(0.0, 0))),
                mean_analyze_seconds: mean(*g.phase_wall.get("analyze").unwrap_or(&(0.0, 0))),
                speedup,
                efficiency: speedup * baseline_resources / resources,
            }
        })
        .collect();

    Ok(Report {
        rows,
        baseline: baseline_key,
        mean_sum_seconds: mean(sum_wall),
        mean_analyze_seconds: mean(analyze_wall),
    })
}

pub fn render_table(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>7} {:>8} {:>8} {:>12} {:>11} {:>11} {:>11} {:>11} {:>8} {:>10}",
        "n_procs",
        "n_threads",
        "windows",
        "packets",
        "makespan_s",
        "mean_read_s",
        "mean_sum_s",
        "mean_anal_s",
        "speedup",
        "efficiency"
    );
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{:>7} {:>8} {:>8} {:>12} {:>11.4} {:>11.6} {:>11.6} {:>11.6} {:>8.3} {:>10.3}",
            r.n_procs,
            r.n_threads,
            r.windows,
            r.packets,
            r.makespan_seconds,
            r.mean_read_seconds,
            r.mean_sum_seconds,
            r.mean_analyze_seconds,
            r.speedup,
            r.efficiency
        );
    }
    let _ = writeln!(
        out,
        "baseline: n_procs={} n_threads={}",
        report.baseline.0, report.baseline.1
    );
    let _ = writeln!(
        out,
        "phase means: sum {:.6}s vs analyze {:.6}s -> summation took {} time than analysis",
        report.mean_sum_seconds,
        report.mean_analyze_seconds,
        if report.sum_slower_than_analyze() {
            "more"
        } else {
            "less or equal"
        }
    );
    out
}

pub const REPORT_CSV_HEADER: &str = "n_procs,n_threads,windows,packets,makespan_seconds,\
throughput_pps,mean_read_seconds,mean_sum_seconds,mean_analyze_seconds,speedup,efficiency";

pub fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", REPORT_CSV_HEADER);
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.9},{:.3},{:.9},{:.9},{:.9},{:.6},{:.6}",
            r.n_procs,
            r.n_threads,
            r.windows,
            r.packets,
            r.makespan_seconds,
            r.throughput_pps,
            r.mean_read_seconds,
            r.mean_sum_seconds,
            r.mean_analyze_seconds,
            r.speedup,
            r.efficiency
        );
    }
    out
}

/// A matplotlib script with the data inlined: speedup over processes
/// against the ideal line, plus per-phase mean times.
pub fn render_plot_script(report: &Report) -> String {
    let mut procs = String::new();
    let mut speedups = String::new();
    let mut sums = String::new();
    let mut analyzes = String::new();
    for r in &report.rows {
        let _ = write!(procs, "{},", r.n_procs * r.n_threads);
        let _ = write!(speedups, "{:.6},", r.speedup);
        let _ = write!(sums, "{:.9},", r.mean_sum_seconds);
        let _ = write!(analyzes, "{:.9},", r.mean_analyze_seconds);
    }
    format!(
        r#"#!/usr/bin/env python3
"""Scaling plot for the traffic-matrix pipeline; data inlined by `report`."""
import matplotlib.pyplot as plt

resources = [{procs}]
speedup = [{speedups}]
mean_sum_s = [{sums}]
mean_analyze_s = [{analyzes}]

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))

ax1.plot(resources, speedup, "o-", label="measured")
ax1.plot(resources, resources, "k--", alpha=0.5, label="ideal")
ax1.set_xlabel("processes x threads")
ax1.set_ylabel("speedup vs baseline")
ax1.set_xscale("log", base=2)
ax1.set_yscale("log", base=2)
ax1.legend()
ax1.set_title("scaling")

ax2.plot(resources, mean_sum_s, "s-", label="sum")
ax2.plot(resources, mean_analyze_s, "^-", label="analyze")
ax2.set_xlabel("processes x threads")
ax2.set_ylabel("mean seconds per window")
ax2.set_xscale("log", base=2)
ax2.legend()
ax2.set_title("phase time")

fig.tight_layout()
fig.savefig("scaling.png", dpi=150)
print("wrote scaling.png")
"#
    )
}

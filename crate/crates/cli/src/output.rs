//! Trace serialization. Every file is written to a temporary sibling and
//! renamed into place.

use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;
use vrvi_core::solvers::TraceMeta;
use vrvi_core::{Algo, RunTrace};

pub const CSV_HEADER: &str = "cost,epoch,gap,dist_sq,wall_ns";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn trace_csv(trace: &RunTrace) -> String {
    let mut s = String::with_capacity(48 * (trace.rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &trace.rows {
        let dist = r.dist_sq.map_or(String::new(), |d| d.to_string());
        writeln!(s, "{},{},{},{},{}", r.cost, r.epoch, r.gap, dist, r.wall_ns).unwrap();
    }
    s
}

/// Per-algorithm mean gap on the grid `k * every`. Each run contributes the
/// first evaluation at or after the grid epoch; runs that stopped earlier
/// drop out, and `runs` counts the contributors.
pub fn summary_csv(runs: &[(Algo, &RunTrace)], every: f64) -> String {
    let mut by_algo: BTreeMap<&str, Vec<&RunTrace>> = BTreeMap::new();
    for (a, t) in runs {
        by_algo.entry(a.name()).or_default().push(t);
    }
    let mut s = String::from("algo,epoch,mean_gap,runs\n");
    for (algo, traces) in by_algo {
        let last = traces.iter().filter_map(|t| t.rows.last()).map(|r| r.epoch).fold(0.0, f64::max);
        let mut k = 0u64;
        loop {
            let e = k as f64 * every;
            if e > last {
                break;
            }
            let gaps: Vec<f64> = traces
                .iter()
                .filter_map(|t| t.rows.iter().find(|r| r.epoch >= e).map(|r| r.gap))
                .collect();
            if !gaps.is_empty() {
                let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
                writeln!(s, "{algo},{e},{mean},{}", gaps.len()).unwrap();
            }
            k += 1;
        }
    }
    s
}

/// Mean-gap curves per algorithm, read back from a summary.
pub fn summary_curves(summary: &str) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for line in summary.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (Ok(e), Ok(g)) = (f[1].parse(), f[2].parse()) else { continue };
        match curves.last_mut() {
            Some((name, pts)) if name == f[0] => pts.push((e, g)),
            _ => curves.push((f[0].to_string(), vec![(e, g)])),
        }
    }
    curves
}

#[derive(Serialize)]
pub struct RunRecord {
    pub algo: Algo,
    pub seed: u64,
    pub file: String,
    pub epochs_to_1e_2: Option<f64>,
    pub final_gap: f64,
    pub failure: Option<String>,
    pub clipped: usize,
    pub meta: TraceMeta,
}

#[derive(Serialize)]
pub struct RunIndex {
    pub name: String,
    pub problem: String,
    /// What one epoch costs in oracle units.
    pub epoch_unit: String,
    pub runs: Vec<RunRecord>,
}

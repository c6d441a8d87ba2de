//! Counters for skipped or degraded pair evaluations and the per-step report.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

/// Thread-safe event counters shared by the force and field passes.
#[derive(Debug, Default)]
pub struct Counters {
    pub coincident_pairs: AtomicU64,
    pub singular_corrections: AtomicU64,
    pub degenerate_tangents: AtomicU64,
    pub stable_dt_warnings: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CounterSnapshot {
    pub coincident_pairs: u64,
    pub singular_corrections: u64,
    pub degenerate_tangents: u64,
    pub stable_dt_warnings: u64,
}

impl Counters {
    pub fn bump(counter: &AtomicU64) {
        counter.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            coincident_pairs: self.coincident_pairs.load(Ordering::Relaxed),
            singular_corrections: self.singular_corrections.load(Ordering::Relaxed),
            degenerate_tangents: self.degenerate_tangents.load(Ordering::Relaxed),
            stable_dt_warnings: self.stable_dt_warnings.load(Ordering::Relaxed),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct StepReport {
    pub step: u64,
    pub time: f64,
    pub max_speed: f64,
    pub min_density_ratio: f64,
    pub max_density_ratio: f64,
    pub min_temperature: f64,
    pub max_temperature: f64,
    /// `stable_dt / dt`; values below one mean the fixed step is too large.
    pub dt_headroom: f64,
    pub counters: CounterSnapshot,
}

//! Result files written by the command-line tool.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::SequenceBest;
use crate::planner::{FeasibleEntry, RunStats};

/// Contents of `results.json`. Holds nothing time-dependent, so equal seeds
/// give byte-identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub name: String,
    pub seed: u64,
    pub t0: f64,
    pub stats: RunStats,
    pub per_sequence: Vec<SequenceBest>,
    /// Sorted best first.
    pub entries: Vec<FeasibleEntry>,
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub seed: u64,
    pub n_eval: usize,
    pub n_iter: usize,
    pub n_feasible: usize,
    pub best_sequence: Option<String>,
    pub best_f_obj: Option<f64>,
    pub wall_time_s: f64,
}

/// Best entry of every sequence present in `entries`, sorted by f_obj.
pub fn per_sequence_best(entries: &[FeasibleEntry]) -> Vec<SequenceBest> {
    let mut best: BTreeMap<&str, &FeasibleEntry> = BTreeMap::new();
    for e in entries {
        let slot = best.entry(e.sequence.as_str()).or_insert(e);
        if e.f_obj < slot.f_obj || (e.f_obj == slot.f_obj && e.s < slot.s) {
            *slot = e;
        }
    }
    let mut rows: Vec<SequenceBest> = best
        .into_values()
        .map(|e| SequenceBest {
            sequence: e.sequence.clone(),
            s: e.s.clone(),
            f_obj: e.f_obj,
            v_inf: e.record.v_inf_arrival,
            total_dv: e.record.total_dv,
            total_t: e.record.total_t,
        })
        .collect();
    rows.sort_by(|a, b| a.f_obj.total_cmp(&b.f_obj).then_with(|| a.s.cmp(&b.s)));
    rows
}

/// One run of a repetition campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRun {
    pub seed: u64,
    pub n_eval: usize,
    pub n_feasible: usize,
    pub best_sequence: Option<String>,
    pub best_f_obj: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub name: String,
    pub reps: usize,
    pub success_threshold: Option<f64>,
    /// Fraction of runs whose best f_obj is below the threshold.
    pub success_rate: Option<f64>,
    /// Fraction of runs with at least one feasible solution.
    pub feasible_rate: f64,
    /// Mean best f_obj over runs that found one.
    pub mean_best: Option<f64>,
    pub mean_evals: f64,
    pub runs: Vec<StatsRun>,
}

impl StatsSummary {
    pub fn from_runs(name: &str, threshold: Option<f64>, mut runs: Vec<StatsRun>) -> Self {
        runs.sort_by_key(|r| r.seed);
        let n = runs.len().max(1) as f64;
        let bests: Vec<f64> = runs.iter().filter_map(|r| r.best_f_obj).collect();
        Self {
            name: name.to_string(),
            reps: runs.len(),
            success_threshold: threshold,
            success_rate: threshold.map(|th| bests.iter().filter(|&&f| f < th).count() as f64 / n),
            feasible_rate: bests.len() as f64 / n,
            mean_best: (!bests.is_empty()).then(|| bests.iter().sum::<f64>() / bests.len() as f64),
            mean_evals: runs.iter().map(|r| r.n_eval as f64).sum::<f64>() / n,
            runs,
        }
    }
}

/// One launch date of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t0: f64,
    pub sequence: Option<String>,
    pub f_obj: Option<f64>,
    pub s: Option<Vec<u32>>,
    pub feasible_runs: usize,
    pub runs: usize,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::io::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

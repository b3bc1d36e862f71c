//! The run report: per-arm records, aggregates, and the rounding that makes
//! two identical runs byte-identical on disk.
//!
//! Every float is passed through [`round_g8`] before it is stored, so the
//! JSON serializer's shortest round-trip representation is exactly the
//! number's 8-significant-digit form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use selftrain::error::{Error, Result};
use selftrain::fmt::g8;
use selftrain::selftrain::GenerationStats;
use selftrain::MetricsReport64;

/// Rounds to 8 significant digits (the value the `%.8g` rendering denotes).
pub fn round_g8(v: f64) -> f64 {
    g8(v).parse().expect("g8 output always parses back")
}

/// Rounds every float inside a metrics report in place.
pub fn round_metrics(m: &mut MetricsReport64) {
    m.accuracy = round_g8(m.accuracy);
    m.macro_sensitivity = round_g8(m.macro_sensitivity);
    m.macro_specificity = round_g8(m.macro_specificity);
    m.macro_f1 = round_g8(m.macro_f1);
    let per_class = m
        .per_class_sensitivity
        .iter_mut()
        .chain(m.per_class_specificity.iter_mut())
        .chain(m.per_class_f1.iter_mut())
        .chain(m.per_class_auc.iter_mut());
    for value in per_class.flatten() {
        *value = round_g8(*value);
    }
    if let Some(value) = &mut m.macro_auc {
        *value = round_g8(*value);
    }
    for value in m.top_k_accuracy.values_mut() {
        *value = round_g8(*value);
    }
}

/// Rounds every float inside a generation trail in place.
pub fn round_generations(generations: &mut [GenerationStats<f64>]) {
    for generation in generations {
        for class in &mut generation.classes {
            class.z = round_g8(class.z);
        }
        if let Some(holdout) = &mut generation.holdout {
            round_metrics(holdout);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One (variant, alpha, seed) execution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub variant: String,
    pub alpha: f64,
    pub seed_index: usize,
    /// The derived per-run seed actually used.
    pub seed: u64,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Validation metrics of the supervised teacher (generation 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub teacher: Option<MetricsReport64>,
    /// Test metrics of the final model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<MetricsReport64>,
    /// Per-generation audit trail; empty for `naive` and failed runs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generations: Vec<GenerationStats<f64>>,
}

/// Min/median/max of one metric over an arm's completed runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// Seed-spread summary of one (variant, alpha) arm.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmAggregate {
    pub variant: String,
    pub alpha: f64,
    pub metrics: BTreeMap<String, MetricSummary>,
}

/// Everything `run` reports: the runs in execution order, then per-arm
/// aggregates over the runs that completed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub runs: Vec<RunRecord>,
    pub aggregates: Vec<ArmAggregate>,
}

/// The scalar test metrics a report row exposes, in canonical order:
/// the four macro metrics, then macro AUC when defined, then top-k.
pub fn scalar_metrics(m: &MetricsReport64) -> Vec<(String, f64)> {
    let mut out = vec![
        ("accuracy".to_string(), m.accuracy),
        ("macro_sensitivity".to_string(), m.macro_sensitivity),
        ("macro_specificity".to_string(), m.macro_specificity),
        ("macro_f1".to_string(), m.macro_f1),
    ];
    if let Some(auc) = m.macro_auc {
        out.push(("macro_auc".to_string(), auc));
    }
    for (&k, &v) in &m.top_k_accuracy {
        out.push((format!("top_{k}"), v));
    }
    out
}

/// Median with the even case averaging the two middle values.
pub fn median(mut values: Vec<f64>) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    values.sort_by(|a, b| a.partial_cmp(b).expect("values are finite"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn summarize_values(mut values: Vec<f64>) -> MetricSummary {
    values.sort_by(|a, b| a.partial_cmp(b).expect("metrics are finite"));
    MetricSummary {
        min: values[0],
        median: round_g8(median(values.clone())),
        max: values[values.len() - 1],
    }
}

/// Per-arm min/median/max over completed runs, arms in first-appearance
/// order. Only metrics present in every completed run of the arm appear
/// (macro AUC drops out of an arm when any seed leaves it undefined); arms
/// with no completed run are omitted.
pub fn aggregate(records: &[RunRecord]) -> Vec<ArmAggregate> {
    let mut order: Vec<(String, f64)> = Vec::new();
    for r in records {
        let arm = (r.variant.clone(), r.alpha);
        if !order.contains(&arm) {
            order.push(arm);
        }
    }
    let mut aggregates = Vec::new();
    for (variant, alpha) in order {
        let completed: Vec<&MetricsReport64> = records
            .iter()
            .filter(|r| r.variant == variant && r.alpha == alpha && r.status == RunStatus::Ok)
            .filter_map(|r| r.test.as_ref())
            .collect();
        if completed.is_empty() {
            continue;
        }
        let mut by_key: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for report in &completed {
            for (key, value) in scalar_metrics(report) {
                by_key.entry(key).or_default().push(value);
            }
        }
        let metrics = by_key
            .into_iter()
            .filter(|(_, values)| values.len() == completed.len())
            .map(|(key, values)| (key, summarize_values(values)))
            .collect();
        aggregates.push(ArmAggregate {
            variant,
            alpha,
            metrics,
        });
    }
    aggregates
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
    json.push('\n');
    std::fs::write(path, json).map_err(|e| Error::file_io(path, e))
}

pub fn load_report(path: &Path) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file_io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))
}

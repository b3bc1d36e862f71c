//! The `compare` subcommand: B minus A, arm by arm, seed by seed.
//!
//! Reports with the same arm set pair runs by (variant, alpha, seed index);
//! two single-arm reports pair across arms by seed index (the naive-vs-ISDL
//! comparison). Anything else — and any failed or missing run on either
//! side — is a key mismatch.

use std::collections::BTreeMap;
use std::path::Path;

use selftrain::error::{Error, Result};
use selftrain::fmt::g8;
use selftrain::MetricsReport64;

use crate::report::{load_report, median, round_g8, scalar_metrics, RunRecord, RunReport, RunStatus};

/// Arm identity: variant name plus the alpha's canonical rendering.
type Arm = (String, String);

fn arm_of(record: &RunRecord) -> Arm {
    (record.variant.clone(), g8(record.alpha))
}

fn arm_label(arm: &Arm) -> String {
    format!("{}@alpha={}", arm.0, arm.1)
}

fn run_label(arm: &Arm, seed_index: usize) -> String {
    format!("{}#seed{}", arm_label(arm), seed_index)
}

/// Arms in first-appearance order plus a (arm, seed index) lookup.
struct IndexedReport<'a> {
    arms: Vec<Arm>,
    runs: BTreeMap<(Arm, usize), &'a RunRecord>,
}

fn index_report<'a>(report: &'a RunReport, side: &str) -> Result<IndexedReport<'a>> {
    let mut arms = Vec::new();
    let mut runs = BTreeMap::new();
    for record in &report.runs {
        let arm = arm_of(record);
        if !arms.contains(&arm) {
            arms.push(arm.clone());
        }
        if runs.insert((arm.clone(), record.seed_index), record).is_some() {
            return Err(Error::KeyError(format!(
                "{side} lists {} twice",
                run_label(&arm, record.seed_index)
            )));
        }
    }
    if arms.is_empty() {
        return Err(Error::KeyError(format!("{side} contains no runs")));
    }
    Ok(IndexedReport { arms, runs })
}

/// A paired run must have completed with metrics on both sides.
fn metrics_of<'a>(
    record: &'a RunRecord,
    side: &str,
    arm: &Arm,
    seed_index: usize,
) -> Result<&'a MetricsReport64> {
    if record.status != RunStatus::Ok {
        return Err(Error::KeyError(format!(
            "{side} {} failed and cannot be compared",
            run_label(arm, seed_index)
        )));
    }
    record.test.as_ref().ok_or_else(|| {
        Error::KeyError(format!(
            "{side} {} has no test metrics",
            run_label(arm, seed_index)
        ))
    })
}

/// One comparison group: matching arm (or arm pair) with per-seed metrics.
struct PairGroup<'a> {
    arm_a: Arm,
    arm_b: Arm,
    /// (seed index, metrics A, metrics B), ascending by seed index.
    pairs: Vec<(usize, &'a MetricsReport64, &'a MetricsReport64)>,
}

fn pair_runs<'a>(a: &IndexedReport<'a>, b: &IndexedReport<'a>) -> Result<Vec<PairGroup<'a>>> {
    let mut sorted_a = a.arms.clone();
    let mut sorted_b = b.arms.clone();
    sorted_a.sort();
    sorted_b.sort();

    let arm_pairs: Vec<(Arm, Arm)> = if sorted_a == sorted_b {
        a.arms.iter().map(|arm| (arm.clone(), arm.clone())).collect()
    } else if a.arms.len() == 1 && b.arms.len() == 1 {
        vec![(a.arms[0].clone(), b.arms[0].clone())]
    } else {
        let list = |arms: &[Arm]| {
            arms.iter()
                .map(arm_label)
                .collect::<Vec<_>>()
                .join(", ")
        };
        return Err(Error::KeyError(format!(
            "arm sets differ: A has [{}], B has [{}]",
            list(&sorted_a),
            list(&sorted_b)
        )));
    };

    let mut groups = Vec::new();
    for (arm_a, arm_b) in arm_pairs {
        let seeds_a: Vec<usize> = a
            .runs
            .keys()
            .filter(|(arm, _)| *arm == arm_a)
            .map(|&(_, si)| si)
            .collect();
        let seeds_b: Vec<usize> = b
            .runs
            .keys()
            .filter(|(arm, _)| *arm == arm_b)
            .map(|&(_, si)| si)
            .collect();
        if seeds_a != seeds_b {
            return Err(Error::KeyError(format!(
                "seed indices differ for {} vs {}: A has {:?}, B has {:?}",
                arm_label(&arm_a),
                arm_label(&arm_b),
                seeds_a,
                seeds_b
            )));
        }
        let mut pairs = Vec::with_capacity(seeds_a.len());
        for si in seeds_a {
            let ra = a.runs[&(arm_a.clone(), si)];
            let rb = b.runs[&(arm_b.clone(), si)];
            pairs.push((
                si,
                metrics_of(ra, "A", &arm_a, si)?,
                metrics_of(rb, "B", &arm_b, si)?,
            ));
        }
        groups.push(PairGroup { arm_a, arm_b, pairs });
    }
    Ok(groups)
}

/// Metric keys shared by every paired run of one side.
fn common_keys(reports: &[&MetricsReport64]) -> Vec<String> {
    let mut keys: Vec<String> = scalar_metrics(reports[0]).into_iter().map(|(k, _)| k).collect();
    for report in &reports[1..] {
        let here: Vec<String> = scalar_metrics(report).into_iter().map(|(k, _)| k).collect();
        keys.retain(|k| here.contains(k));
    }
    keys
}

pub fn compare(report_a: &Path, report_b: &Path) -> Result<u8> {
    let a = load_report(report_a)?;
    let b = load_report(report_b)?;
    let output = compare_reports(&a, &b)?;
    print!("{output}");
    Ok(0)
}

/// The delta table as a CSV string: per arm pair and metric, the median of
/// per-seed (B − A) differences plus win/tie counts.
pub fn compare_reports(a: &RunReport, b: &RunReport) -> Result<String> {
    let indexed_a = index_report(a, "A")?;
    let indexed_b = index_report(b, "B")?;
    let groups = pair_runs(&indexed_a, &indexed_b)?;

    let all_a: Vec<&MetricsReport64> = groups.iter().flat_map(|g| g.pairs.iter().map(|p| p.1)).collect();
    let all_b: Vec<&MetricsReport64> = groups.iter().flat_map(|g| g.pairs.iter().map(|p| p.2)).collect();
    let keys_a = common_keys(&all_a);
    let keys_b = common_keys(&all_b);
    if keys_a != keys_b {
        let only = |xs: &[String], ys: &[String]| {
            xs.iter()
                .filter(|k| !ys.contains(k))
                .cloned()
                .collect::<Vec<_>>()
                .join(", ")
        };
        return Err(Error::KeyError(format!(
            "metric keys differ: only in A: [{}]; only in B: [{}]",
            only(&keys_a, &keys_b),
            only(&keys_b, &keys_a)
        )));
    }

    let mut out = String::from("arm_a,arm_b,metric,delta,wins_a,wins_b,ties\n");
    for group in &groups {
        for key in &keys_a {
            let mut deltas = Vec::with_capacity(group.pairs.len());
            let (mut wins_a, mut wins_b, mut ties) = (0usize, 0usize, 0usize);
            for (_, ma, mb) in &group.pairs {
                let va = lookup(ma, key);
                let vb = lookup(mb, key);
                deltas.push(vb - va);
                if vb > va {
                    wins_b += 1;
                } else if va > vb {
                    wins_a += 1;
                } else {
                    ties += 1;
                }
            }
            let raw = round_g8(median(deltas));
            // −0 canonicalizes to 0 so swapped arguments print exact negations.
            let delta = if raw == 0.0 { 0.0 } else { raw };
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                arm_label(&group.arm_a),
                arm_label(&group.arm_b),
                key,
                g8(delta),
                wins_a,
                wins_b,
                ties
            ));
        }
    }
    Ok(out)
}

fn lookup(report: &MetricsReport64, key: &str) -> f64 {
    scalar_metrics(report)
        .into_iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .expect("key set was intersected over every paired run")
}

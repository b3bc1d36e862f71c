//! The `sweep` subcommand: how alpha reshapes generation-1 selection.
//!
//! One teacher is trained per seed (from the root seed directly) and shared
//! by every (variant, alpha) cell, so count differences within a seed are
//! the schedule's doing alone.

use std::path::Path;

use selftrain::classifier::Classifier;
use selftrain::error::{Error, Result};
use selftrain::fmt::g8;
use selftrain::selftrain::{
    rank_classes, select_pseudo, PseudoLabelBatch, SamplingSchedule, Variant,
};
use selftrain::MlpClassifier64;

use crate::config::ExperimentConfig;
use crate::data::prepare;

pub fn sweep(config_path: &Path) -> Result<u8> {
    let config = ExperimentConfig::load(config_path)?;
    if config.alphas.len() < 2 {
        return Err(Error::ConfigError(format!(
            "alphas: sweep requires at least 2 values, got {}",
            config.alphas.len()
        )));
    }
    let data = prepare(&config)?;
    if data.pool.is_empty() {
        return Err(Error::InvalidSpec(
            "sweep requires a nonempty unlabeled pool".into(),
        ));
    }

    let train_cfg = config.train.to_core();
    let floor = config.self_train.confidence_floor;
    let ranking = rank_classes(&data.train.class_counts())?;
    let classes = data.class_names().len();

    // (variant idx, alpha idx, seed idx) -> row; filled seed-major so each
    // teacher trains once, then emitted variant-major.
    let mut rows: Vec<((usize, usize, usize), String)> = Vec::new();
    for (si, &seed) in config.seeds.iter().enumerate() {
        let (model, _) = MlpClassifier64::fit(&data.train, &train_cfg, seed)?;
        let probs = model.predict_proba(data.pool.features())?;
        let batch = PseudoLabelBatch::from_probabilities(data.pool.sample_ids(), &probs)?;
        for (vi, &variant) in config.variants.iter().enumerate() {
            if variant == Variant::Naive {
                continue;
            }
            for (ai, &alpha) in config.alphas.iter().enumerate() {
                let schedule = SamplingSchedule::new(variant, alpha, &ranking)?;
                let selected = select_pseudo(&batch, &ranking, &schedule, floor)?;
                let mut per_class = vec![0usize; classes];
                for item in &selected {
                    per_class[item.class] += 1;
                }
                let counts: Vec<String> = per_class.iter().map(ToString::to_string).collect();
                rows.push((
                    (vi, ai, si),
                    format!(
                        "{},{},{},{},{}",
                        variant.name(),
                        g8(alpha),
                        si,
                        selected.len(),
                        counts.join(",")
                    ),
                ));
            }
        }
    }
    rows.sort();

    let mut out = format!("variant,alpha,seed_index,total,{}\n", data.class_names().join(","));
    for (_, row) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    print!("{out}");
    Ok(0)
}

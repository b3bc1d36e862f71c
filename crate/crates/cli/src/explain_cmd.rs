//! The `explain` subcommand and the attribution renderer `run` reuses.
//!
//! Attributions always come from the first configured arm
//! (`variants[0]`, `alphas[0]`, seed index 0) so they describe the same
//! model whether produced by `run` or standalone.

use std::path::Path;

use serde::Serialize;

use selftrain::error::{Error, Result};
use selftrain::linalg::Matrix;
use selftrain::selftrain::{self_train, SelfTrainOutcome};
use selftrain::shap::{explain, render_heatmap, tile_grouping, ExplainerConfig};
use selftrain::MlpClassifier64;

use crate::config::ExperimentConfig;
use crate::data::{prepare, PreparedData};
use crate::report::round_g8;
use crate::run_cmd::derive_run_seed;

/// One attributed class as stored in `attributions.json`.
#[derive(Debug, Serialize)]
struct ExplanationRecord {
    class: usize,
    class_name: String,
    /// Model output for the all-background coalition.
    base_value: f64,
    /// Per-feature (or per-tile) attributions; base + sum = the prediction.
    phi: Vec<f64>,
}

pub fn explain_command(config_path: &Path, instance: Option<usize>) -> Result<u8> {
    let config = ExperimentConfig::load(config_path)?;
    let out = config.output.clone().ok_or_else(|| {
        Error::ConfigError("output: required by the explain subcommand".into())
    })?;
    let section = config.explain.as_ref().ok_or_else(|| {
        Error::ConfigError("explain: section required by the explain subcommand".into())
    })?;
    let instances = match instance {
        Some(i) => vec![i],
        None => section.instances.clone(),
    };
    if instances.is_empty() {
        return Err(Error::ConfigError(
            "explain.instances: empty and no --instance given".into(),
        ));
    }

    let data = prepare(&config)?;
    let variant = config.variants[0];
    let alpha = config.alphas[0];
    let run_seed = derive_run_seed(config.seeds[0], variant, alpha, 0);
    let outcome: SelfTrainOutcome<MlpClassifier64> = self_train(
        &data.train,
        &data.pool,
        &config.train.to_core(),
        &config.self_train.to_core(variant, alpha),
        None,
        run_seed,
    )?;
    write_explanations(
        &outcome.model,
        &data,
        &config,
        &instances,
        &out.join("explain"),
    )?;
    Ok(0)
}

/// Renders `instance_<id>/attributions.json` plus one heatmap (CSV, PGM,
/// sign CSV) per attributed class under `out_root`.
pub fn write_explanations(
    model: &MlpClassifier64,
    data: &PreparedData,
    config: &ExperimentConfig,
    instances: &[usize],
    out_root: &Path,
) -> Result<()> {
    let section = config
        .explain
        .as_ref()
        .ok_or_else(|| Error::ConfigError("explain: section required".into()))?;

    let background = Matrix::from_rows(&[data.train.feature_mean()?])?;
    let mut explainer = ExplainerConfig::new(background);
    explainer.budget = section.coalition_budget();
    explainer.seed = derive_run_seed(config.seeds[0], config.variants[0], config.alphas[0], 0);
    let (height, width) = match &section.tile {
        Some(t) => (t.height, t.width),
        None => (1, data.train.dim()),
    };
    explainer.grouping = match &section.tile {
        Some(t) => Some(tile_grouping(t.height, t.width, t.tile_h, t.tile_w)?),
        None => None,
    };

    let names = data.class_names();
    for &idx in instances {
        if idx >= data.test.len() {
            return Err(Error::InvalidSpec(format!(
                "explain instance {idx} is out of range: the test split has {} rows",
                data.test.len()
            )));
        }
        let explanations = explain(model, data.test.row(idx), &explainer, section.top_n)?;
        let dir = out_root.join(format!("instance_{idx}"));
        std::fs::create_dir_all(&dir).map_err(|e| Error::file_io(&dir, e))?;

        let records: Vec<ExplanationRecord> = explanations
            .iter()
            .map(|e| ExplanationRecord {
                class: e.class,
                class_name: names[e.class].clone(),
                base_value: round_g8(e.base_value),
                phi: e.phi.iter().map(|&p| round_g8(p)).collect(),
            })
            .collect();
        let path = dir.join("attributions.json");
        let mut json = serde_json::to_string_pretty(&records)
            .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
        json.push('\n');
        std::fs::write(&path, json).map_err(|e| Error::file_io(&path, e))?;

        for e in &explanations {
            render_heatmap(
                &e.phi,
                explainer.grouping.as_deref(),
                height,
                width,
                dir.join(format!("class_{}", names[e.class])),
            )?;
        }
    }
    Ok(())
}

//! The `run` subcommand: every (variant, alpha, seed) arm, end to end.

use std::path::Path;
use std::time::Instant;

use selftrain::classifier::Classifier;
use selftrain::error::{Error, Result};
use selftrain::fmt::{fnv1a64, g8};
use selftrain::metrics::{roc_curve, write_roc_csv, MetricsReport};
use selftrain::selftrain::{self_train, write_generations_csv, SelfTrainOutcome, Variant};
use selftrain::MlpClassifier64;

use crate::config::ExperimentConfig;
use crate::data::{prepare, PreparedData};
use crate::explain_cmd::write_explanations;
use crate::report::{
    aggregate, round_generations, round_g8, round_metrics, write_report, RunRecord, RunReport,
    RunStatus,
};

/// Test metrics include top-1 and top-2 accuracy.
const TEST_TOP_KS: [usize; 2] = [1, 2];

/// Per-run seed: the root seed for this repetition, decorrelated across arms
/// so no two (variant, alpha) runs share a random stream, yet fully
/// determined by the config.
pub fn derive_run_seed(root: u64, variant: Variant, alpha: f64, seed_index: usize) -> u64 {
    let mut bytes = Vec::with_capacity(variant.name().len() + 16);
    bytes.extend_from_slice(variant.name().as_bytes());
    bytes.extend_from_slice(&alpha.to_le_bytes());
    bytes.extend_from_slice(&(seed_index as u64).to_le_bytes());
    root ^ fnv1a64(&bytes)
}

/// Directory name of one run, unique per (variant, alpha, seed index).
pub fn arm_dir_name(variant: Variant, alpha: f64, seed_index: usize) -> String {
    format!("{}_alpha{}_seed{}", variant.name(), g8(alpha), seed_index)
}

pub fn run(config_path: &Path, out: &Path) -> Result<u8> {
    let config = ExperimentConfig::load(config_path)?;
    let data = prepare(&config)?;
    std::fs::create_dir_all(out).map_err(|e| Error::file_io(out, e))?;

    let total_timer = Instant::now();
    let mut records = Vec::new();
    let mut explain_model: Option<MlpClassifier64> = None;
    for (vi, &variant) in config.variants.iter().enumerate() {
        for (ai, &alpha) in config.alphas.iter().enumerate() {
            for (si, &root) in config.seeds.iter().enumerate() {
                let run_seed = derive_run_seed(root, variant, alpha, si);
                let arm = arm_dir_name(variant, alpha, si);
                let arm_dir = out.join("runs").join(&arm);
                let timer = Instant::now();
                match execute_run(&data, &config, variant, alpha, si, run_seed, &arm_dir) {
                    Ok((record, model)) => {
                        eprintln!("{arm}: ok in {:.2?}", timer.elapsed());
                        if vi == 0 && ai == 0 && si == 0 {
                            explain_model = Some(model);
                        }
                        records.push(record);
                    }
                    Err(e) => {
                        eprintln!("{arm}: failed in {:.2?}: {e}", timer.elapsed());
                        records.push(RunRecord {
                            variant: variant.name().to_string(),
                            alpha: round_g8(alpha),
                            seed_index: si,
                            seed: run_seed,
                            status: RunStatus::Failed,
                            error: Some(e.to_string()),
                            teacher: None,
                            test: None,
                            generations: Vec::new(),
                        });
                    }
                }
            }
        }
    }

    let report = RunReport {
        aggregates: aggregate(&records),
        runs: records,
    };
    write_report(&report, &out.join("report.json"))?;

    let mut failed = report.runs.iter().any(|r| r.status == RunStatus::Failed);
    if let Some(ex) = &config.explain {
        if !ex.instances.is_empty() {
            let result = match &explain_model {
                Some(model) => {
                    write_explanations(model, &data, &config, &ex.instances, &out.join("explain"))
                }
                None => Err(Error::InvalidSpec(
                    "the first arm failed, so there is no model to explain".into(),
                )),
            };
            if let Err(e) = result {
                eprintln!("explain: {e}");
                failed = true;
            }
        }
    }
    eprintln!("total: {:.2?}", total_timer.elapsed());
    Ok(if failed { 2 } else { 0 })
}

/// One arm execution: self-train, evaluate on the test split, write the
/// run's files, and assemble its (rounded) report record.
fn execute_run(
    data: &PreparedData,
    config: &ExperimentConfig,
    variant: Variant,
    alpha: f64,
    seed_index: usize,
    run_seed: u64,
    arm_dir: &Path,
) -> Result<(RunRecord, MlpClassifier64)> {
    let train_cfg = config.train.to_core();
    let st_cfg = config.self_train.to_core(variant, alpha);
    let outcome: SelfTrainOutcome<MlpClassifier64> = self_train(
        &data.train,
        &data.pool,
        &train_cfg,
        &st_cfg,
        Some(&data.val),
        run_seed,
    )?;

    let probs = outcome.model.predict_proba(data.test.features())?;
    let mut test_report = MetricsReport::from_probabilities(&probs, data.test.labels(), &TEST_TOP_KS)?;

    std::fs::create_dir_all(arm_dir).map_err(|e| Error::file_io(arm_dir, e))?;
    if variant != Variant::Naive {
        let path = arm_dir.join("generations.csv");
        let file = std::fs::File::create(&path).map_err(|e| Error::file_io(&path, e))?;
        write_generations_csv(&outcome.generations, std::io::BufWriter::new(file))
            .map_err(|e| Error::file_io(&path, e))?;
    }
    write_roc_files(data, &probs, arm_dir)?;

    let mut teacher = outcome.teacher_metrics.clone();
    if let Some(t) = &mut teacher {
        round_metrics(t);
    }
    round_metrics(&mut test_report);
    let mut generations = outcome.generations.clone();
    round_generations(&mut generations);

    let record = RunRecord {
        variant: variant.name().to_string(),
        alpha: round_g8(alpha),
        seed_index,
        seed: run_seed,
        status: RunStatus::Ok,
        error: None,
        teacher,
        test: Some(test_report),
        generations,
    };
    Ok((record, outcome.model))
}

/// One-vs-rest ROC points per class on the test split. Classes whose curve
/// is undefined (absent, or the only class present) get no file.
fn write_roc_files(
    data: &PreparedData,
    probs: &selftrain::Matrix64,
    arm_dir: &Path,
) -> Result<()> {
    for (class, name) in data.class_names().iter().enumerate() {
        let scores: Vec<f64> = (0..probs.rows()).map(|i| probs.row(i)[class]).collect();
        let positives: Vec<bool> = data.test.labels().iter().map(|&l| l == class).collect();
        match roc_curve(&scores, &positives) {
            Ok(points) => {
                write_roc_csv(&points, arm_dir.join(format!("roc_{name}.csv")))?;
            }
            Err(Error::UndefinedAUC(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

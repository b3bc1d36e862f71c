//! Turns the dataset section of a config into concrete splits and a pool.

use selftrain::dataset::{load_labeled_csv, load_pool_csv, make_synthetic, stratified_split};
use selftrain::error::{Error, Result};
use selftrain::{LabeledDataset64, UnlabeledPool64};

use crate::config::ExperimentConfig;

/// The materialized experiment inputs every subcommand works from.
pub struct PreparedData {
    pub train: LabeledDataset64,
    pub val: LabeledDataset64,
    pub test: LabeledDataset64,
    pub pool: UnlabeledPool64,
}

impl PreparedData {
    pub fn class_names(&self) -> &[String] {
        self.train.class_names()
    }
}

fn reject_missing_file(e: Error) -> Error {
    match e {
        Error::FileIo { path, source } => {
            Error::ConfigError(format!("dataset.csv: cannot read {}: {source}", path))
        }
        other => other,
    }
}

/// Loads (or generates) the labeled data and pool, then splits the labeled
/// part. Deterministic in the config alone.
pub fn prepare(config: &ExperimentConfig) -> Result<PreparedData> {
    let (labeled, pool) = if let Some(syn) = &config.dataset.synthetic {
        make_synthetic(&syn.to_spec(), syn.seed)
            .map_err(|e| Error::ConfigError(format!("dataset.synthetic: {e}")))?
    } else {
        let csv = config
            .dataset
            .csv
            .as_ref()
            .expect("config validation guarantees a dataset source");
        // An unreadable path is a config problem (exit 1); malformed content
        // inside a readable file stays a parse error (exit 2).
        let (labeled, _ids) = load_labeled_csv(&csv.labeled).map_err(reject_missing_file)?;
        let pool = match &csv.pool {
            Some(path) => load_pool_csv(path).map_err(reject_missing_file)?,
            None => UnlabeledPool64::empty(labeled.dim()),
        };
        if pool.dim() != labeled.dim() {
            return Err(Error::ShapeError(format!(
                "pool dimension {} does not match labeled dimension {}",
                pool.dim(),
                labeled.dim()
            )));
        }
        (labeled, pool)
    };
    let ratios = config.split.ratios()?;
    let (train, val, test) = stratified_split(&labeled, &ratios, config.split.seed)?;
    Ok(PreparedData {
        train,
        val,
        test,
        pool,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn synthetic_config(json_tail: &str) -> ExperimentConfig {
        let json = format!(
            r#"{{
                "dataset": {{"synthetic": {{
                    "means": [[0.0, 0.0], [4.0, 4.0]],
                    "scales": [0.5, 0.5],
                    "counts": [60, 20],
                    "unlabeled": 30,
                    "seed": 11
                }}}},
                "split": {{"train": 0.5, "val": 0.25, "test": 0.25, "seed": 2}},
                "variants": ["naive"],
                "alphas": [1.0],
                "seeds": [1]{json_tail}
            }}"#
        );
        serde_json::from_str(&json).unwrap()
    }

    #[test]
    fn synthetic_prepare_is_deterministic_and_split_sums_match() {
        let config = synthetic_config("");
        let a = prepare(&config).unwrap();
        let b = prepare(&config).unwrap();
        assert_eq!(a.train.len() + a.val.len() + a.test.len(), 80);
        assert_eq!(a.pool.len(), 30);
        assert_eq!(a.train.features(), b.train.features());
        assert_eq!(a.test.labels(), b.test.labels());
        assert_eq!(a.class_names(), ["class0", "class1"]);
    }

    #[test]
    fn missing_csv_path_is_a_config_error() {
        let json = r#"{
            "dataset": {"csv": {"labeled": "/nonexistent/never.csv"}},
            "split": {"train": 0.5, "val": 0.25, "test": 0.25, "seed": 2},
            "variants": ["naive"],
            "alphas": [1.0],
            "seeds": [1]
        }"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        let err = prepare(&config).unwrap_err();
        assert!(matches!(err, Error::ConfigError(_)), "got {err:?}");
        assert!(err.to_string().contains("cannot read"));
    }

    #[test]
    fn csv_source_without_pool_gets_an_empty_pool() {
        let dir = tempfile::tempdir().unwrap();
        let labeled = dir.path().join("labeled.csv");
        let mut f = std::fs::File::create(&labeled).unwrap();
        writeln!(f, "id,label,f0,f1").unwrap();
        for i in 0..8 {
            let label = if i % 2 == 0 { "a" } else { "b" };
            writeln!(f, "s{i},{label},{}.0,{}.5", i, i).unwrap();
        }
        drop(f);

        let json = format!(
            r#"{{
                "dataset": {{"csv": {{"labeled": {:?}}}}},
                "split": {{"train": 0.5, "val": 0.25, "test": 0.25, "seed": 2}},
                "variants": ["naive"],
                "alphas": [1.0],
                "seeds": [1]
            }}"#,
            labeled
        );
        let config: ExperimentConfig = serde_json::from_str(&json).unwrap();
        let data = prepare(&config).unwrap();
        assert_eq!(data.pool.len(), 0);
        assert_eq!(data.pool.dim(), 2);
        assert_eq!(data.class_names(), ["a", "b"]);
    }
}

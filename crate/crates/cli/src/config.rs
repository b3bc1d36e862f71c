//! JSON experiment configuration: schema, loading, and validation.
//!
//! Every structural or semantic problem in the file surfaces as
//! [`Error::ConfigError`] naming the offending field, so the binary can map
//! it to its dedicated exit code.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use selftrain::classifier::TrainConfig;
use selftrain::dataset::{SplitRatios, SyntheticSpec};
use selftrain::error::{Error, Result};
use selftrain::selftrain::{SelfTrainConfig, Variant};
use selftrain::shap::Budget;

/// Top-level experiment description, one JSON file per experiment.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Where the labeled data and the unlabeled pool come from.
    pub dataset: DatasetConfig,
    /// Stratified train/val/test ratios and the shuffle seed.
    pub split: SplitSection,
    /// Classifier hyperparameters; every field optional.
    #[serde(default)]
    pub train: TrainSection,
    /// Self-training loop knobs shared by all arms; `alpha` and the variant
    /// are arm coordinates and live in `alphas`/`variants` instead.
    #[serde(default)]
    pub self_train: SelfTrainSection,
    /// Arms to run: any subset of `naive`, `ISDL`, `ISDLplus`.
    pub variants: Vec<Variant>,
    /// Sampling-exponent sweep values.
    pub alphas: Vec<f64>,
    /// Root seeds; each index is one repetition of every arm.
    pub seeds: Vec<u64>,
    /// Output directory for the `explain` subcommand (`run` takes `--out`).
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Attribution requests rendered after a run.
    #[serde(default)]
    pub explain: Option<ExplainSection>,
}

/// Exactly one of the two sources must be present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    #[serde(default)]
    pub synthetic: Option<SyntheticSection>,
    #[serde(default)]
    pub csv: Option<CsvSection>,
}

/// Gaussian-blob benchmark generator parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSection {
    #[serde(default)]
    pub class_names: Option<Vec<String>>,
    /// Per-class blob centers, all of one dimension.
    pub means: Vec<Vec<f64>>,
    /// Per-class isotropic standard deviations.
    pub scales: Vec<f64>,
    /// Per-class labeled sample counts.
    pub counts: Vec<usize>,
    /// Unlabeled pool size.
    pub unlabeled: usize,
    /// Generator seed, independent of the run seeds.
    pub seed: u64,
}

/// CSV-file dataset source. Relative paths resolve against the config file's
/// directory.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSection {
    /// Labeled table: header `id,label,f0,...`.
    pub labeled: PathBuf,
    /// Unlabeled pool table: header `id,f0,...`; omit for no pool.
    #[serde(default)]
    pub pool: Option<PathBuf>,
}

/// Stratified split fractions plus the shuffle seed.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSection {
    pub fn ratios(&self) -> Result<SplitRatios> {
        SplitRatios::new(self.train, self.val, self.test)
            .map_err(|e| Error::ConfigError(format!("split: {e}")))
    }
}

/// Mirror of the classifier's training knobs with JSON-friendly defaults.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub base_lr: f64,
    pub decay_factor: f64,
    pub decay_start_epoch: usize,
    pub hidden_units: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::<f64>::default();
        TrainSection {
            epochs: d.epochs,
            batch_size: d.batch_size,
            base_lr: d.base_lr,
            decay_factor: d.decay_factor,
            decay_start_epoch: d.decay_start_epoch,
            hidden_units: d.hidden_units,
            beta1: d.beta1,
            beta2: d.beta2,
            epsilon: d.epsilon,
        }
    }
}

impl TrainSection {
    pub fn to_core(&self) -> TrainConfig<f64> {
        TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            base_lr: self.base_lr,
            decay_factor: self.decay_factor,
            decay_start_epoch: self.decay_start_epoch,
            hidden_units: self.hidden_units,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.epsilon,
        }
    }
}

/// Self-training knobs common to every arm.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelfTrainSection {
    pub generations: usize,
    pub confidence_floor: f64,
    pub remove_selected_from_pool: bool,
    pub recompute_ranking_each_generation: bool,
}

impl Default for SelfTrainSection {
    fn default() -> Self {
        let d = SelfTrainConfig::<f64>::default();
        SelfTrainSection {
            generations: d.generations,
            confidence_floor: d.confidence_floor,
            remove_selected_from_pool: d.remove_selected_from_pool,
            recompute_ranking_each_generation: d.recompute_ranking_each_generation,
        }
    }
}

impl SelfTrainSection {
    pub fn to_core(&self, variant: Variant, alpha: f64) -> SelfTrainConfig<f64> {
        SelfTrainConfig {
            generations: self.generations,
            alpha,
            variant,
            confidence_floor: self.confidence_floor,
            remove_selected_from_pool: self.remove_selected_from_pool,
            recompute_ranking_each_generation: self.recompute_ranking_each_generation,
        }
    }
}

/// Which test instances to attribute and how to render the result.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplainSection {
    /// Row indices into the test split.
    #[serde(default)]
    pub instances: Vec<usize>,
    /// How many top-probability classes to attribute per instance.
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    /// Coalition budget; omit for full enumeration.
    #[serde(default)]
    pub budget: Option<usize>,
    /// Optional tiling that groups features into image-style patches.
    #[serde(default)]
    pub tile: Option<TileSection>,
}

fn default_top_n() -> usize {
    1
}

impl ExplainSection {
    pub fn coalition_budget(&self) -> Budget {
        match self.budget {
            Some(n) => Budget::Sampled(n),
            None => Budget::Full,
        }
    }
}

/// Feature grid and patch shape for grouped attribution heatmaps.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileSection {
    pub height: usize,
    pub width: usize,
    pub tile_h: usize,
    pub tile_w: usize,
}

impl ExperimentConfig {
    /// Reads, parses, path-resolves, and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let mut config: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.resolve_paths(&dir);
        config.validate()?;
        Ok(config)
    }

    /// Anchors every relative path at the config file's directory.
    fn resolve_paths(&mut self, dir: &Path) {
        let anchor = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(csv) = &mut self.dataset.csv {
            anchor(&mut csv.labeled);
            if let Some(pool) = &mut csv.pool {
                anchor(pool);
            }
        }
        if let Some(out) = &mut self.output {
            anchor(out);
        }
    }

    fn validate(&self) -> Result<()> {
        match (&self.dataset.synthetic, &self.dataset.csv) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::ConfigError(
                    "dataset: provide exactly one of `synthetic` or `csv`".into(),
                ))
            }
            _ => {}
        }
        if let Some(syn) = &self.dataset.synthetic {
            validate_synthetic_shape(&syn.to_spec())
                .map_err(|e| Error::ConfigError(format!("dataset.synthetic: {e}")))?;
        }
        self.split.ratios()?;
        self.train
            .to_core()
            .validate()
            .map_err(|e| Error::ConfigError(format!("train: {e}")))?;
        if self.variants.is_empty() {
            return Err(Error::ConfigError("variants: must not be empty".into()));
        }
        for (i, v) in self.variants.iter().enumerate() {
            if self.variants[..i].contains(v) {
                return Err(Error::ConfigError(format!(
                    "variants[{i}]: duplicate entry {v}"
                )));
            }
        }
        if self.alphas.is_empty() {
            return Err(Error::ConfigError("alphas: must not be empty".into()));
        }
        for (i, &a) in self.alphas.iter().enumerate() {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::ConfigError(format!(
                    "alphas[{i}]: must be finite and nonnegative, got {a}"
                )));
            }
            if self.alphas[..i].contains(&a) {
                return Err(Error::ConfigError(format!(
                    "alphas[{i}]: duplicate value {a}"
                )));
            }
        }
        if self.seeds.is_empty() {
            return Err(Error::ConfigError("seeds: must not be empty".into()));
        }
        if self.self_train.generations == 0 {
            return Err(Error::ConfigError(
                "self_train.generations: must be at least 1".into(),
            ));
        }
        let floor = self.self_train.confidence_floor;
        if !(floor.is_finite() && (0.0..1.0).contains(&floor)) {
            return Err(Error::ConfigError(format!(
                "self_train.confidence_floor: must lie in [0,1), got {floor}"
            )));
        }
        if let Some(ex) = &self.explain {
            if ex.top_n == 0 {
                return Err(Error::ConfigError(
                    "explain.top_n: must be at least 1".into(),
                ));
            }
            if ex.budget == Some(0) {
                return Err(Error::ConfigError(
                    "explain.budget: must be at least 1 when given".into(),
                ));
            }
            if let Some(t) = &ex.tile {
                if t.height == 0 || t.width == 0 || t.tile_h == 0 || t.tile_w == 0 {
                    return Err(Error::ConfigError(
                        "explain.tile: all dimensions must be positive".into(),
                    ));
                }
                if t.height % t.tile_h != 0 || t.width % t.tile_w != 0 {
                    return Err(Error::ConfigError(format!(
                        "explain.tile: {}x{} grid is not divisible into {}x{} tiles",
                        t.height, t.width, t.tile_h, t.tile_w
                    )));
                }
            }
        }
        Ok(())
    }
}

impl SyntheticSection {
    pub fn to_spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            class_names: self.class_names.clone(),
            means: self.means.clone(),
            scales: self.scales.clone(),
            counts: self.counts.clone(),
            unlabeled: self.unlabeled,
        }
    }
}

/// Cheap structural checks mirroring the generator's own validation, run at
/// config time so mistakes surface as ConfigError rather than a failed run.
fn validate_synthetic_shape(spec: &SyntheticSpec) -> Result<()> {
    let classes = spec.means.len();
    if classes < 2 {
        return Err(Error::ConfigError(format!(
            "need at least 2 classes, got {classes}"
        )));
    }
    let dim = spec.means[0].len();
    if dim == 0 || spec.means.iter().any(|m| m.len() != dim) {
        return Err(Error::ConfigError(
            "means must be nonempty rows of one common dimension".into(),
        ));
    }
    if spec.scales.len() != classes || spec.counts.len() != classes {
        return Err(Error::ConfigError(format!(
            "scales ({}) and counts ({}) must match the {classes} classes",
            spec.scales.len(),
            spec.counts.len()
        )));
    }
    if let Some(names) = &spec.class_names {
        if names.len() != classes {
            return Err(Error::ConfigError(format!(
                "class_names ({}) must match the {classes} classes",
                names.len()
            )));
        }
    }
    Ok(())
}

//! The generational self-training loop: teacher, pseudo-label, select,
//! ingest, retrain.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use crate::classifier::{Classifier, TrainConfig};
use crate::dataset::{LabeledDataset, UnlabeledPool};
use crate::error::{Error, Result};
use crate::fmt::{fnv1a64, g8};
use crate::metrics::MetricsReport;
use crate::scalar::Scalar;
use crate::selftrain::schedule::{rank_classes, ClassRanking, SamplingSchedule, Variant};
use crate::selftrain::select::{above_floor_counts, select_pseudo, PseudoLabelBatch};

/// Top-k cutoffs evaluated on the holdout set after every generation.
const HOLDOUT_TOP_KS: [usize; 2] = [1, 2];

/// Knobs of the self-training loop itself (the classifier has its own
/// [`TrainConfig`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTrainConfig<T: Scalar = f64> {
    /// Pseudo-labeling rounds after the teacher; each predicts, selects, and
    /// retrains.
    pub generations: usize,
    /// Sampling-proportion exponent; 0 selects everything above the floor.
    pub alpha: T,
    /// Proportion formula; `Naive` skips pseudo-labeling entirely.
    pub variant: Variant,
    /// Minimum confidence a pseudo-label needs to be considered at all.
    pub confidence_floor: T,
    /// Drop ingested samples from the pool so later generations cannot
    /// re-label them.
    pub remove_selected_from_pool: bool,
    /// Re-rank classes from the current working counts each generation
    /// instead of freezing the teacher's ranking.
    pub recompute_ranking_each_generation: bool,
}

impl<T: Scalar> Default for SelfTrainConfig<T> {
    fn default() -> Self {
        SelfTrainConfig {
            generations: 5,
            alpha: T::one(),
            variant: Variant::Isdl,
            confidence_floor: T::zero(),
            remove_selected_from_pool: true,
            recompute_ranking_each_generation: true,
        }
    }
}

impl<T: Scalar> SelfTrainConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::InvalidSpec("generations must be at least 1".into()));
        }
        if !(self.alpha.is_finite() && self.alpha >= T::zero()) {
            return Err(Error::InvalidSpec(format!(
                "alpha must be finite and nonnegative, got {:?}",
                self.alpha
            )));
        }
        if !(self.confidence_floor.is_finite()
            && self.confidence_floor >= T::zero()
            && self.confidence_floor < T::one())
        {
            return Err(Error::InvalidSpec(format!(
                "confidence floor must lie in [0,1), got {:?}",
                self.confidence_floor
            )));
        }
        Ok(())
    }
}

/// One class's slice of a generation, reported in rank order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationClassStats<T: Scalar = f64> {
    pub class: usize,
    pub rank: usize,
    /// Sampling proportion this generation used for the class.
    pub z: T,
    /// Pseudo-labels at or above the confidence floor.
    pub n_pseudo: usize,
    /// Pseudo-labels actually ingested.
    pub n_selected: usize,
    /// Working labeled-set count after ingestion.
    pub working_count: usize,
}

/// Everything observable about one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats<T: Scalar = f64> {
    /// 1-based; the teacher is generation 0 and emits no row.
    pub generation: usize,
    /// Per-class stats in rank order (majority first).
    pub classes: Vec<GenerationClassStats<T>>,
    /// Metrics of this generation's model on the holdout set, when one was
    /// provided.
    pub holdout: Option<MetricsReport<T>>,
}

/// Final model plus the audit trail of how it got there.
#[derive(Debug, Clone)]
pub struct SelfTrainOutcome<M, T: Scalar = f64> {
    pub model: M,
    /// Holdout metrics of the supervised teacher (generation 0).
    pub teacher_metrics: Option<MetricsReport<T>>,
    pub generations: Vec<GenerationStats<T>>,
}

/// Seed for retraining at generation `g`: decorrelated from the teacher seed
/// but fully determined by it.
fn generation_seed(seed: u64, generation: usize) -> u64 {
    let mut bytes = Vec::with_capacity(28);
    bytes.extend_from_slice(b"selftrain-generation");
    bytes.extend_from_slice(&(generation as u64).to_le_bytes());
    seed ^ fnv1a64(&bytes)
}

fn holdout_metrics<T: Scalar, M: Classifier<T>>(
    model: &M,
    holdout: &LabeledDataset<T>,
) -> Result<MetricsReport<T>> {
    let probs = model.predict_proba(holdout.features())?;
    MetricsReport::from_probabilities(&probs, holdout.labels(), &HOLDOUT_TOP_KS)
}

/// Runs generational self-training.
///
/// Generation 0 trains the teacher on `labeled` alone with `seed`. Each later
/// generation predicts the remaining pool, keeps the per-class
/// top-confidence fraction the schedule dictates, appends those rows with
/// their pseudo-labels to the working set, and retrains from scratch under a
/// generation-specific seed. A generation that selects nothing keeps the
/// previous model. With [`Variant::Naive`] the teacher is the final model and
/// no generations run. Fully deterministic in `seed`.
pub fn self_train<T: Scalar, M: Classifier<T>>(
    labeled: &LabeledDataset<T>,
    pool: &UnlabeledPool<T>,
    train_cfg: &TrainConfig<T>,
    st_cfg: &SelfTrainConfig<T>,
    holdout: Option<&LabeledDataset<T>>,
    seed: u64,
) -> Result<SelfTrainOutcome<M, T>> {
    st_cfg.validate()?;
    if labeled.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if pool.dim() != labeled.dim() {
        return Err(Error::ShapeError(format!(
            "pool dimension {} does not match labeled dimension {}",
            pool.dim(),
            labeled.dim()
        )));
    }
    if let Some(h) = holdout {
        if h.dim() != labeled.dim() {
            return Err(Error::ShapeError(format!(
                "holdout dimension {} does not match labeled dimension {}",
                h.dim(),
                labeled.dim()
            )));
        }
    }

    let (mut model, _) = M::fit(labeled, train_cfg, seed)?;
    let teacher_metrics = holdout.map(|h| holdout_metrics(&model, h)).transpose()?;
    if st_cfg.variant == Variant::Naive {
        return Ok(SelfTrainOutcome {
            model,
            teacher_metrics,
            generations: Vec::new(),
        });
    }

    let mut working = labeled.clone();
    let mut pool_work = pool.clone();
    let mut frozen: Option<(ClassRanking, SamplingSchedule<T>)> = None;
    let mut generations = Vec::with_capacity(st_cfg.generations);

    for generation in 1..=st_cfg.generations {
        let (ranking, schedule) = if st_cfg.recompute_ranking_each_generation {
            let ranking = rank_classes(&working.class_counts())?;
            let schedule = SamplingSchedule::new(st_cfg.variant, st_cfg.alpha, &ranking)?;
            (ranking, schedule)
        } else {
            if frozen.is_none() {
                let ranking = rank_classes(&working.class_counts())?;
                let schedule = SamplingSchedule::new(st_cfg.variant, st_cfg.alpha, &ranking)?;
                frozen = Some((ranking, schedule));
            }
            frozen.clone().expect("just populated")
        };

        let (n_pseudo, selected) = if pool_work.is_empty() {
            (vec![0; working.n_classes()], Vec::new())
        } else {
            let probs = model.predict_proba(pool_work.features())?;
            let batch = PseudoLabelBatch::from_probabilities(pool_work.sample_ids(), &probs)?;
            let n_pseudo = above_floor_counts(&batch, st_cfg.confidence_floor);
            let selected = select_pseudo(&batch, &ranking, &schedule, st_cfg.confidence_floor)?;
            (n_pseudo, selected)
        };

        let mut n_selected = vec![0usize; working.n_classes()];
        if !selected.is_empty() {
            let index_of: BTreeMap<u64, usize> = pool_work
                .sample_ids()
                .iter()
                .enumerate()
                .map(|(i, &id)| (id, i))
                .collect();
            let mut taken_rows = Vec::with_capacity(selected.len());
            for item in &selected {
                let row = index_of[&item.sample_id];
                working.push_row(pool_work.row(row), item.class)?;
                n_selected[item.class] += 1;
                taken_rows.push(row);
            }
            if st_cfg.remove_selected_from_pool {
                taken_rows.sort_unstable();
                pool_work.remove_rows(&taken_rows);
            }
            let (retrained, _) = M::fit(&working, train_cfg, generation_seed(seed, generation))?;
            model = retrained;
        }

        let working_counts = working.class_counts();
        let classes = (1..=ranking.len())
            .map(|rank| {
                let class = ranking.class_at_rank(rank);
                GenerationClassStats {
                    class,
                    rank,
                    z: schedule.z_at_rank(rank),
                    n_pseudo: n_pseudo[class],
                    n_selected: n_selected[class],
                    working_count: working_counts[class],
                }
            })
            .collect();
        let holdout_report = holdout.map(|h| holdout_metrics(&model, h)).transpose()?;
        generations.push(GenerationStats {
            generation,
            classes,
            holdout: holdout_report,
        });
    }

    Ok(SelfTrainOutcome {
        model,
        teacher_metrics,
        generations,
    })
}

/// Writes the per-generation audit log as CSV, one row per class in rank
/// order within each generation.
pub fn write_generations_csv<T: Scalar, W: io::Write>(
    stats: &[GenerationStats<T>],
    mut w: W,
) -> io::Result<()> {
    writeln!(w, "generation,class,rank,z,n_pseudo,n_selected,working_count")?;
    for gen in stats {
        for c in &gen.classes {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                gen.generation,
                c.class,
                c.rank,
                g8(c.z.as_f64()),
                c.n_pseudo,
                c.n_selected,
                c.working_count
            )?;
        }
    }
    Ok(())
}

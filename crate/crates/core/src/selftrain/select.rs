//! Pseudo-label batches and the per-class top-confidence selection rule.

use crate::classifier::argmax;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::selftrain::schedule::{ClassRanking, SamplingSchedule};

/// One pool sample's prediction: argmax class and its probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoLabel<T: Scalar = f64> {
    pub sample_id: u64,
    pub class: usize,
    pub confidence: T,
}

/// All pseudo-labels of one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoLabelBatch<T: Scalar = f64> {
    classes: usize,
    items: Vec<PseudoLabel<T>>,
}

impl<T: Scalar> PseudoLabelBatch<T> {
    /// Builds the batch from pool probability rows: class = argmax (ties to
    /// the lowest index), confidence = the max probability.
    pub fn from_probabilities(sample_ids: &[u64], probs: &Matrix<T>) -> Result<Self> {
        if sample_ids.len() != probs.rows() {
            return Err(Error::ShapeError(format!(
                "{} sample ids vs {} probability rows",
                sample_ids.len(),
                probs.rows()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &id in sample_ids {
            if !seen.insert(id) {
                return Err(Error::InvalidSpec(format!("duplicate sample id {id}")));
            }
        }
        let items = sample_ids
            .iter()
            .enumerate()
            .map(|(i, &sample_id)| {
                let row = probs.row(i);
                let class = argmax(row);
                let confidence = row[class];
                if !(confidence >= T::zero() && confidence <= T::one()) {
                    return Err(Error::InvalidSpec(format!(
                        "confidence {confidence:?} outside [0,1] for sample {sample_id}"
                    )));
                }
                Ok(PseudoLabel {
                    sample_id,
                    class,
                    confidence,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PseudoLabelBatch {
            classes: probs.cols(),
            items,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn items(&self) -> &[PseudoLabel<T>] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Per-class counts of pseudo-labels at or above the confidence floor — the
/// base `n_c` the `⌈z_l·n_c⌉` rule draws from.
pub fn above_floor_counts<T: Scalar>(batch: &PseudoLabelBatch<T>, floor: T) -> Vec<usize> {
    let mut counts = vec![0usize; batch.classes()];
    for item in batch.items() {
        if item.confidence >= floor {
            counts[item.class] += 1;
        }
    }
    counts
}

/// Selects, for each class at rank `l` with `n_c` pseudo-labels at or above
/// the floor, the `⌈z_l·n_c⌉` highest-confidence ones (confidence ties break
/// by ascending sample id). Output is canonical: classes in rank order,
/// selections by descending confidence — invariant under any permutation of
/// the input batch.
pub fn select_pseudo<T: Scalar>(
    batch: &PseudoLabelBatch<T>,
    ranking: &ClassRanking,
    schedule: &SamplingSchedule<T>,
    floor: T,
) -> Result<Vec<PseudoLabel<T>>> {
    if batch.classes() != ranking.len() || schedule.z().len() != ranking.len() {
        return Err(Error::ShapeError(format!(
            "batch has {} classes, ranking {}, schedule {}",
            batch.classes(),
            ranking.len(),
            schedule.z().len()
        )));
    }
    let mut per_class: Vec<Vec<&PseudoLabel<T>>> = vec![Vec::new(); batch.classes()];
    for item in batch.items() {
        if item.confidence >= floor {
            per_class[item.class].push(item);
        }
    }
    let mut selected = Vec::new();
    for l in 1..=ranking.len() {
        let class = ranking.class_at_rank(l);
        let bucket = &mut per_class[class];
        bucket.sort_by(|a, b| {
            b.confidence
                .partial_cmp(&a.confidence)
                .expect("confidences are finite")
                .then(a.sample_id.cmp(&b.sample_id))
        });
        let n = bucket.len();
        if n == 0 {
            continue;
        }
        let quota = (schedule.z_at_rank(l) * T::from_usize(n).expect("count fits scalar"))
            .ceil()
            .to_usize()
            .expect("quota fits usize")
            .min(n);
        selected.extend(bucket[..quota].iter().map(|item| **item));
    }
    Ok(selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selftrain::schedule::{rank_classes, SamplingSchedule, Variant};
    use proptest::prelude::*;

    fn batch_from(parts: &[(u64, usize, f64)]) -> PseudoLabelBatch<f64> {
        PseudoLabelBatch {
            classes: 3,
            items: parts
                .iter()
                .map(|&(sample_id, class, confidence)| PseudoLabel {
                    sample_id,
                    class,
                    confidence,
                })
                .collect(),
        }
    }

    #[test]
    fn batch_from_probabilities_takes_argmax_and_max() {
        let probs = Matrix::from_rows(&[vec![0.2, 0.5, 0.3], vec![0.4, 0.4, 0.2]]).unwrap();
        let batch = PseudoLabelBatch::from_probabilities(&[10, 11], &probs).unwrap();
        assert_eq!(batch.items()[0].class, 1);
        assert_eq!(batch.items()[0].confidence, 0.5);
        // Tie at 0.4 resolves to the lower class index.
        assert_eq!(batch.items()[1].class, 0);
        assert!(PseudoLabelBatch::from_probabilities(&[5, 5], &probs).is_err());
    }

    #[test]
    fn full_fraction_takes_every_sample() {
        // Class 0 is the extreme minority (rank 3) → z = 1.
        let ranking = rank_classes(&[1, 100, 50]).unwrap();
        let schedule = SamplingSchedule::new(Variant::Isdl, 1.0, &ranking).unwrap();
        let batch = batch_from(&[(1, 0, 0.9), (2, 0, 0.4), (3, 0, 0.7), (4, 0, 0.6)]);
        let picked = select_pseudo(&batch, &ranking, &schedule, 0.0).unwrap();
        assert_eq!(picked.len(), 4);
        // Canonical order: descending confidence.
        let ids: Vec<u64> = picked.iter().map(|p| p.sample_id).collect();
        assert_eq!(ids, [1, 3, 4, 2]);
    }

    #[test]
    fn rank_one_tenth_keeps_single_best() {
        // counts [100,50,10] → majority z = 0.1; ten class-1 pseudo-labels.
        let ranking = rank_classes(&[50, 100, 10]).unwrap();
        let schedule = SamplingSchedule::new(Variant::Isdl, 1.0, &ranking).unwrap();
        let parts: Vec<(u64, usize, f64)> =
            (0..10).map(|i| (i as u64, 1, 0.3 + 0.05 * i as f64)).collect();
        let batch = batch_from(&parts);
        let picked = select_pseudo(&batch, &ranking, &schedule, 0.0).unwrap();
        assert_eq!(picked.len(), 1);
        assert_eq!(picked[0].sample_id, 9);
    }

    #[test]
    fn floor_filters_before_selection() {
        let ranking = rank_classes(&[100, 50, 10]).unwrap();
        let schedule = SamplingSchedule::new(Variant::Isdl, 1.0, &ranking).unwrap();
        let batch = batch_from(&[(1, 0, 0.5), (2, 1, 0.5), (3, 2, 0.5)]);
        let picked = select_pseudo(&batch, &ranking, &schedule, 0.99).unwrap();
        assert!(picked.is_empty());
        assert_eq!(above_floor_counts(&batch, 0.99), [0, 0, 0]);
        assert_eq!(above_floor_counts(&batch, 0.5), [1, 1, 1]);
    }

    #[test]
    fn confidence_ties_break_by_ascending_id() {
        let ranking = rank_classes(&[10, 100, 50]).unwrap();
        let schedule = SamplingSchedule::new(Variant::Isdl, 1.0, &ranking).unwrap();
        // Class 1 is majority (z = 0.1): two of its labels tie at 0.8.
        let parts: Vec<(u64, usize, f64)> = (0..8)
            .map(|i| (i as u64, 1usize, 0.2))
            .chain([(20u64, 1usize, 0.8), (9u64, 1usize, 0.8)])
            .collect();
        let picked = select_pseudo(&batch_from(&parts), &ranking, &schedule, 0.0).unwrap();
        assert_eq!(picked.len(), 1);
        assert_eq!(picked[0].sample_id, 9);
    }

    #[test]
    fn alpha_zero_selects_everything_above_floor() {
        let ranking = rank_classes(&[100, 50, 10]).unwrap();
        for variant in [Variant::Isdl, Variant::IsdlPlus] {
            let schedule = SamplingSchedule::new(variant, 0.0, &ranking).unwrap();
            let batch = batch_from(&[
                (1, 0, 0.9),
                (2, 0, 0.2),
                (3, 1, 0.6),
                (4, 2, 0.5),
                (5, 2, 0.1),
            ]);
            let picked = select_pseudo(&batch, &ranking, &schedule, 0.15).unwrap();
            assert_eq!(picked.len(), 4, "{variant}");
        }
    }

    #[test]
    fn empty_batch_selects_nothing() {
        let ranking = rank_classes(&[100, 50, 10]).unwrap();
        let schedule = SamplingSchedule::new(Variant::Isdl, 1.0, &ranking).unwrap();
        let picked = select_pseudo(&batch_from(&[]), &ranking, &schedule, 0.0).unwrap();
        assert!(picked.is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        /// Enumeration oracle for the rebalancing effect on one shared pool:
        /// with strictly decreasing labeled and pool counts, uniform per-class
        /// confidences, and α = 1, the ratio of majority-selected to
        /// extreme-minority-selected counts under ISDLplus never exceeds the
        /// ISDL ratio. (The analogous max/min-over-all-ranks statement is
        /// false in general: middle ranks can gain share.)
        #[test]
        fn isdlplus_selects_no_more_majority_skew_than_isdl(
            seed in 0u64..1_000_000,
            classes in 2usize..7,
        ) {
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // Strictly decreasing labeled counts → ranking is the identity.
            let mut labeled: Vec<usize> = Vec::new();
            let mut hi = 500usize;
            for _ in 0..classes {
                hi = rng.gen_range(1..=hi.saturating_sub(1).max(1));
                labeled.push(hi);
            }
            // Strictly decreasing per-class pool counts, same orientation.
            let mut pool: Vec<usize> = Vec::new();
            let mut ph = 400usize;
            for _ in 0..classes {
                ph = rng.gen_range(1..=ph.saturating_sub(1).max(1));
                pool.push(ph);
            }
            prop_assume!(labeled.windows(2).all(|w| w[0] > w[1]));
            prop_assume!(pool.windows(2).all(|w| w[0] > w[1]));

            let ranking = rank_classes(&labeled).unwrap();
            let mut parts = Vec::new();
            let mut next_id = 0u64;
            for (class, &n) in pool.iter().enumerate() {
                for _ in 0..n {
                    // Uniform confidence within each class: selection counts
                    // are driven purely by the schedule.
                    parts.push(PseudoLabel { sample_id: next_id, class, confidence: 0.5 });
                    next_id += 1;
                }
            }
            let batch = PseudoLabelBatch { classes, items: parts };

            let mut ratios = Vec::new();
            for variant in [Variant::Isdl, Variant::IsdlPlus] {
                let schedule = SamplingSchedule::new(variant, 1.0, &ranking).unwrap();
                let picked = select_pseudo(&batch, &ranking, &schedule, 0.0).unwrap();
                let mut counts = vec![0usize; classes];
                for p in &picked {
                    counts[p.class] += 1;
                }
                // Selected count per class must match the ⌈z_l·n_c⌉ rule.
                for (class, &n) in pool.iter().enumerate() {
                    let z = schedule.z_at_rank(class + 1);
                    let expect = (z * n as f64).ceil() as usize;
                    prop_assert_eq!(counts[class], expect.min(n));
                }
                prop_assert!(counts[0] >= 1 && counts[classes - 1] >= 1);
                ratios.push(counts[0] as f64 / counts[classes - 1] as f64);
            }
            prop_assert!(
                ratios[1] <= ratios[0],
                "ISDLplus skew {} > ISDL skew {}", ratios[1], ratios[0]
            );
        }

        #[test]
        fn selection_is_permutation_invariant(
            mut parts in proptest::collection::vec(
                (0u64..1000, 0usize..3, 0.0..1.0f64),
                0..60,
            ),
            rotation in 0usize..60,
            alpha in 0.0..4.0f64,
        ) {
            parts.sort_unstable_by(|a, b| a.0.cmp(&b.0));
            parts.dedup_by_key(|p| p.0);
            let ranking = rank_classes(&[60, 25, 5]).unwrap();
            let schedule = SamplingSchedule::new(Variant::IsdlPlus, alpha, &ranking).unwrap();
            let base = select_pseudo(&batch_from(&parts), &ranking, &schedule, 0.3).unwrap();
            if !parts.is_empty() {
                let k = rotation % parts.len();
                parts.rotate_left(k);
            }
            let rotated = select_pseudo(&batch_from(&parts), &ranking, &schedule, 0.3).unwrap();
            prop_assert_eq!(base, rotated);
        }
    }
}

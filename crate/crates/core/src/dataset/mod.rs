//! Datasets: labeled/unlabeled containers, label mapping, stratified
//! splitting, class statistics, image grids, and synthetic generation.

mod image;
mod io;
mod labels;
mod split;
mod synthetic;

pub use image::{augment, load_csv_grid, load_pgm, write_pgm, AugmentOp, ImageGrid};
pub use io::{load_labeled_csv, load_pool_csv, write_labeled_csv};
pub use labels::{map_diagnosis_label, TargetClass};
pub use split::{stratified_split, SplitRatios};
pub use synthetic::{make_synthetic, SyntheticSpec};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Feature matrix with integer class labels and ordered class names.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T: Scalar = f64> {
    features: Matrix<T>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl<T: Scalar> LabeledDataset<T> {
    /// Validates the container invariants: one label per feature row, at
    /// least two named classes, at least one feature column, every label
    /// below the class count.
    pub fn new(features: Matrix<T>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::ShapeError(format!(
                "{} labels for {} feature rows",
                labels.len(),
                features.rows()
            )));
        }
        if features.cols() == 0 {
            return Err(Error::ShapeError("feature dimension must be ≥ 1".into()));
        }
        if class_names.len() < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 classes, got {}",
                class_names.len()
            )));
        }
        let classes = class_names.len();
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                classes,
            });
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Feature dimension d.
    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Class count L.
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.features.row(i)
    }

    /// Per-class sample counts, indexed by class id; sums to `len()`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Majority count divided by the smallest nonzero count. Classes with a
    /// zero count are excluded from the ratio.
    pub fn imbalance_ratio(&self) -> Result<T> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let counts = self.class_counts();
        let max = counts.iter().copied().max().expect("L ≥ 2");
        let min_nonzero = counts
            .iter()
            .copied()
            .filter(|&c| c > 0)
            .min()
            .expect("nonempty dataset has a nonzero count");
        Ok(T::from_usize(max).expect("count fits scalar") / T::from_usize(min_nonzero).expect("count fits scalar"))
    }

    /// New dataset containing the selected rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        LabeledDataset {
            features: self.features.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }

    /// Appends a feature row with its label (used when ingesting
    /// pseudo-labeled samples).
    pub fn push_row(&mut self, row: &[T], label: usize) -> Result<()> {
        if label >= self.n_classes() {
            return Err(Error::LabelOutOfRange {
                label,
                classes: self.n_classes(),
            });
        }
        self.features.push_row(row)?;
        self.labels.push(label);
        Ok(())
    }

    /// Mean over rows of each feature column; the default attribution
    /// background. Errors on an empty dataset.
    pub fn feature_mean(&self) -> Result<Vec<T>> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let n = T::from_usize(self.len()).expect("count fits scalar");
        let mut mean = vec![T::zero(); self.dim()];
        for i in 0..self.len() {
            for (m, &v) in mean.iter_mut().zip(self.row(i)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        Ok(mean)
    }
}

/// Feature matrix without labels; rows carry stable integer sample ids.
#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledPool<T: Scalar = f64> {
    features: Matrix<T>,
    sample_ids: Vec<u64>,
}

impl<T: Scalar> UnlabeledPool<T> {
    /// Validates one id per row and id uniqueness.
    pub fn new(features: Matrix<T>, sample_ids: Vec<u64>) -> Result<Self> {
        if sample_ids.len() != features.rows() {
            return Err(Error::ShapeError(format!(
                "{} sample ids for {} feature rows",
                sample_ids.len(),
                features.rows()
            )));
        }
        let mut seen = sample_ids.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSpec("duplicate sample ids in pool".into()));
        }
        Ok(UnlabeledPool {
            features,
            sample_ids,
        })
    }

    /// An empty pool of the given feature dimension.
    pub fn empty(dim: usize) -> Self {
        UnlabeledPool {
            features: Matrix::zeros(0, dim),
            sample_ids: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.sample_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix<T> {
        &self.features
    }

    pub fn sample_ids(&self) -> &[u64] {
        &self.sample_ids
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.features.row(i)
    }

    /// Drops the rows at `indices` (ascending, unique); remaining rows keep
    /// their relative order and ids.
    pub fn remove_rows(&mut self, indices: &[usize]) {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let keep: Vec<usize> = {
            let mut drop_iter = indices.iter().copied().peekable();
            (0..self.len())
                .filter(|&i| {
                    if drop_iter.peek() == Some(&i) {
                        drop_iter.next();
                        false
                    } else {
                        true
                    }
                })
                .collect()
        };
        self.features = self.features.select_rows(&keep);
        self.sample_ids = keep.iter().map(|&i| self.sample_ids[i]).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> LabeledDataset {
        LabeledDataset::new(
            Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![2.0, 2.0]]).unwrap(),
            vec![0, 1, 0],
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn construction_validates_labels_and_shapes() {
        let m = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            LabeledDataset::<f64>::new(m.clone(), vec![0], vec!["a".into(), "b".into()]),
            Err(Error::ShapeError(_))
        ));
        assert!(matches!(
            LabeledDataset::<f64>::new(m.clone(), vec![0, 2], vec!["a".into(), "b".into()]),
            Err(Error::LabelOutOfRange { label: 2, classes: 2 })
        ));
        assert!(matches!(
            LabeledDataset::<f64>::new(m, vec![0, 0], vec!["a".into()]),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn class_counts_sum_to_len() {
        let ds = tiny();
        assert_eq!(ds.class_counts(), vec![2, 1]);
        assert_eq!(ds.class_counts().iter().sum::<usize>(), ds.len());
    }

    #[test]
    fn imbalance_ratio_max_over_min_nonzero() {
        let ds = tiny();
        assert_eq!(ds.imbalance_ratio().unwrap(), 2.0);

        // counts [100, 50, 10] → 10.0
        let mut feats = Matrix::zeros(0, 1);
        let mut labels = Vec::new();
        for (class, count) in [(0usize, 100usize), (1, 50), (2, 10)] {
            for _ in 0..count {
                feats.push_row(&[0.0f64]).unwrap();
                labels.push(class);
            }
        }
        let ds =
            LabeledDataset::new(feats, labels, vec!["x".into(), "y".into(), "z".into()]).unwrap();
        assert_eq!(ds.imbalance_ratio().unwrap(), 10.0);
    }

    #[test]
    fn imbalance_ratio_is_one_for_balanced_counts() {
        let ds = LabeledDataset::new(
            Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap(),
            vec![0, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert_eq!(ds.imbalance_ratio().unwrap(), 1.0);
    }

    #[test]
    fn imbalance_ratio_excludes_zero_count_classes() {
        // Class "c" has no samples; ratio uses the nonzero pair only.
        let ds = LabeledDataset::new(
            Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap(),
            vec![0, 0, 1],
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        assert_eq!(ds.imbalance_ratio().unwrap(), 2.0);
    }

    #[test]
    fn empty_dataset_has_no_ratio() {
        let ds = LabeledDataset::<f64>::new(
            Matrix::zeros(0, 3),
            vec![],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        assert!(matches!(ds.imbalance_ratio(), Err(Error::EmptyDataset)));
    }

    #[test]
    fn pool_rejects_duplicate_ids() {
        let m = Matrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        assert!(matches!(
            UnlabeledPool::<f64>::new(m, vec![7, 7]),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn pool_remove_rows_keeps_order() {
        let m = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let mut pool = UnlabeledPool::new(m, vec![10, 11, 12, 13]).unwrap();
        pool.remove_rows(&[0, 2]);
        assert_eq!(pool.sample_ids(), &[11, 13]);
        assert_eq!(pool.row(0), &[1.0]);
        assert_eq!(pool.row(1), &[3.0]);
    }
}

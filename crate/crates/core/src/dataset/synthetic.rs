//! Synthetic imbalanced Gaussian-blob datasets for desk-scale experiments.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{LabeledDataset, UnlabeledPool};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Isotropic Gaussian-blob spec: one mean/scale/count per class plus an
/// unlabeled pool size. The pool is drawn from the class-prior mixture
/// implied by `counts`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Class names; defaults to `class0..class{L-1}` when `None`.
    pub class_names: Option<Vec<String>>,
    /// Per-class blob centers, all of the same dimension d ≥ 1.
    pub means: Vec<Vec<f64>>,
    /// Per-class isotropic standard deviations (≥ 0).
    pub scales: Vec<f64>,
    /// Per-class labeled sample counts.
    pub counts: Vec<usize>,
    /// Unlabeled pool size.
    pub unlabeled: usize,
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        let classes = self.means.len();
        if classes < 2 {
            return Err(Error::InvalidSpec(format!(
                "need at least 2 classes, got {classes}"
            )));
        }
        let dim = self.means[0].len();
        if dim == 0 {
            return Err(Error::InvalidSpec("feature dimension is 0".into()));
        }
        if self.means.iter().any(|m| m.len() != dim) {
            return Err(Error::InvalidSpec("class means differ in dimension".into()));
        }
        if self.scales.len() != classes || self.counts.len() != classes {
            return Err(Error::InvalidSpec(format!(
                "means/scales/counts disagree on class count: {classes}/{}/{}",
                self.scales.len(),
                self.counts.len()
            )));
        }
        if self.scales.iter().any(|&s| !(s >= 0.0) || !s.is_finite()) {
            return Err(Error::InvalidSpec("scales must be finite and ≥ 0".into()));
        }
        if let Some(names) = &self.class_names {
            if names.len() != classes {
                return Err(Error::InvalidSpec(format!(
                    "{} class names for {classes} classes",
                    names.len()
                )));
            }
        }
        if self.counts.iter().all(|&c| c == 0) {
            return Err(Error::InvalidSpec("all class counts are 0".into()));
        }
        Ok(())
    }

    fn names(&self) -> Vec<String> {
        self.class_names.clone().unwrap_or_else(|| {
            (0..self.means.len()).map(|c| format!("class{c}")).collect()
        })
    }
}

/// Draws the labeled blobs and the prior-mixture unlabeled pool.
/// Deterministic under `seed`: labeled rows are drawn class by class in
/// class order, then pool rows in id order (ids are `0..unlabeled`).
pub fn make_synthetic<T: Scalar>(
    spec: &SyntheticSpec,
    seed: u64,
) -> Result<(LabeledDataset<T>, UnlabeledPool<T>)> {
    spec.validate()?;
    let dim = spec.means[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // All randomness is drawn in f64 and converted, so every Scalar sees the
    // same stream.
    let draw_row = |rng: &mut ChaCha8Rng, class: usize| -> Vec<T> {
        let mean = &spec.means[class];
        let scale = spec.scales[class];
        (0..dim)
            .map(|j| {
                let z: f64 = StandardNormal.sample(rng);
                T::from_f64_lossy(mean[j] + scale * z)
            })
            .collect()
    };

    let mut features = Matrix::zeros(0, dim);
    let mut labels = Vec::new();
    for (class, &count) in spec.counts.iter().enumerate() {
        for _ in 0..count {
            let row = draw_row(&mut rng, class);
            features.push_row(&row).expect("fixed width");
            labels.push(class);
        }
    }
    let labeled = LabeledDataset::new(features, labels, spec.names())?;

    let total: usize = spec.counts.iter().sum();
    let mut pool_features = Matrix::zeros(0, dim);
    for _ in 0..spec.unlabeled {
        // Categorical draw over the labeled priors counts[c]/total.
        let mut ticket = rng.gen_range(0..total);
        let class = spec
            .counts
            .iter()
            .position(|&c| {
                if ticket < c {
                    true
                } else {
                    ticket -= c;
                    false
                }
            })
            .expect("ticket < total");
        let row = draw_row(&mut rng, class);
        pool_features.push_row(&row).expect("fixed width");
    }
    let pool = UnlabeledPool::new(pool_features, (0..spec.unlabeled as u64).collect())?;
    Ok((labeled, pool))
}

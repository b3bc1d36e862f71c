//! Stratified train/validation/test splitting with largest-remainder
//! per-class allocation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LabeledDataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Train/validation/test fractions; each strictly inside (0,1) and summing
/// to 1 within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self> {
        let r = SplitRatios { train, val, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("train", self.train), ("val", self.val), ("test", self.test)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidRatios(format!(
                    "{name} ratio {v} is outside (0,1)"
                )));
            }
        }
        let sum = self.train + self.val + self.test;
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidRatios(format!("ratios sum to {sum}, not 1")));
        }
        Ok(())
    }
}

impl Default for SplitRatios {
    /// The 80/10/10 convention.
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

/// Splits per class with largest-remainder rounding of `count·ratio`;
/// remainder ties go to train, then val, then test. Membership within each
/// class is a seeded shuffle, so the same seed reproduces the same splits
/// byte for byte. Classes with a single sample land in train.
pub fn stratified_split<T: Scalar>(
    ds: &LabeledDataset<T>,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<(LabeledDataset<T>, LabeledDataset<T>, LabeledDataset<T>)> {
    ratios.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buckets: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for class in 0..ds.n_classes() {
        let mut members: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels()[i] == class).collect();
        members.shuffle(&mut rng);
        let quota = allocate(members.len(), ratios);
        let mut offset = 0;
        for (bucket, &take) in buckets.iter_mut().zip(quota.iter()) {
            bucket.extend_from_slice(&members[offset..offset + take]);
            offset += take;
        }
    }
    for bucket in &mut buckets {
        bucket.sort_unstable();
    }
    let [train, val, test] = buckets;
    Ok((ds.subset(&train), ds.subset(&val), ds.subset(&test)))
}

/// Largest-remainder allocation of `count` units across the three splits.
fn allocate(count: usize, ratios: &SplitRatios) -> [usize; 3] {
    let quotas = [
        count as f64 * ratios.train,
        count as f64 * ratios.val,
        count as f64 * ratios.test,
    ];
    let mut alloc = [0usize; 3];
    let mut fractions = [0f64; 3];
    for i in 0..3 {
        alloc[i] = quotas[i].floor() as usize;
        fractions[i] = quotas[i] - quotas[i].floor();
    }
    let mut remaining = count - alloc.iter().sum::<usize>();
    // Larger fractional remainder wins; ties resolve in split order
    // (train, val, test), which the stable ordering below preserves.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| fractions[b].partial_cmp(&fractions[a]).expect("finite fractions"));
    for &i in &order {
        if remaining == 0 {
            break;
        }
        alloc[i] += 1;
        remaining -= 1;
    }
    alloc
}

//! Coalitions (feature subsets), the attribution kernel weight, and the
//! budgeted coalition enumerator/sampler.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A subset of the F explained features, packed as a bit mask (bit j set =
/// feature j present). The all-ones mask stands for the explained instance
/// itself, the all-zeros mask for the background reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition {
    mask: u64,
    features: usize,
}

impl Coalition {
    pub fn new(mask: u64, features: usize) -> Result<Self> {
        if features == 0 || features > 64 {
            return Err(Error::InvalidSpec(format!(
                "coalitions support 1..=64 features, got {features}"
            )));
        }
        if features < 64 && mask >> features != 0 {
            return Err(Error::ShapeError(format!(
                "mask {mask:#x} has bits beyond feature {features}"
            )));
        }
        Ok(Coalition { mask, features })
    }

    pub fn empty(features: usize) -> Result<Self> {
        Coalition::new(0, features)
    }

    pub fn full(features: usize) -> Result<Self> {
        let mask = if features == 64 {
            u64::MAX
        } else {
            (1u64 << features) - 1
        };
        Coalition::new(mask, features)
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn features(&self) -> usize {
        self.features
    }

    /// Number of present features.
    pub fn size(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn contains(&self, feature: usize) -> bool {
        feature < self.features && self.mask >> feature & 1 == 1
    }

    pub fn is_empty_set(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full_set(&self) -> bool {
        self.size() == self.features
    }

    /// The same subset with `feature` added.
    pub fn with(&self, feature: usize) -> Result<Self> {
        if feature >= self.features {
            return Err(Error::ShapeError(format!(
                "feature {feature} out of range for {} features",
                self.features
            )));
        }
        Coalition::new(self.mask | 1 << feature, self.features)
    }
}

/// C(n, k) exactly (n ≤ 64), via the overflow-safe multiplicative form.
fn binomial_u128(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        // c * (n-k+i) is always divisible by i here: c holds C(n-k+i-1, i-1).
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial_u128(n, k) as f64
}

/// Regression weight of a coalition of `size` present features out of
/// `features`: (F−1) / (C(F,s)·s·(F−s)). The empty and full coalitions have
/// no finite weight — they enter the solve as equality constraints — so
/// asking for them is an error.
pub fn kernel_weight<T: Scalar>(features: usize, size: usize) -> Result<T> {
    if features == 0 {
        return Err(Error::InvalidSpec("no features to weight".into()));
    }
    if size == 0 || size >= features {
        return Err(Error::ConstraintCoalition { size, features });
    }
    let denom = binomial_f64(features, size) * (size * (features - size)) as f64;
    Ok(T::from_f64_lossy((features - 1) as f64 / denom))
}

/// One coalition with its regression weight. Weight 0 marks the two
/// constraint endpoints (empty/full), which never act as weighted rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedCoalition<T: Scalar = f64> {
    pub coalition: Coalition,
    pub weight: T,
}

/// Evaluation budget: enumerate every coalition or spend a fixed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// All 2^F coalitions; guarded to F ≤ 25.
    Full,
    /// Exactly this many coalitions (the two endpoints included); must be at
    /// least F+2.
    Sampled(usize),
}

/// Largest F accepted for full enumeration (2^25 ≈ 33M coalitions).
pub const FULL_ENUMERATION_LIMIT: usize = 25;

/// Next-larger mask with the same popcount (Gosper's hack).
fn next_same_size(mask: u64) -> u64 {
    let c = mask & mask.wrapping_neg();
    let r = mask + c;
    (((r ^ mask) >> 2) / c) | r
}

/// Builds the coalition set for one explanation.
///
/// `Full` enumerates all 2^F masks in ascending order. `Sampled(budget)`
/// places the empty and full endpoints first, then fills size classes in
/// descending kernel-weight order (sizes 1 and F−1 first); a class that does
/// not fit entirely is sampled without replacement, each survivor carrying a
/// multiplicity weight of kernel_weight·class_size/sample_count so the class
/// keeps its total weight. Deterministic in `seed`.
pub fn coalitions<T: Scalar>(
    features: usize,
    budget: Budget,
    seed: u64,
) -> Result<Vec<WeightedCoalition<T>>> {
    if features == 0 || features > 64 {
        return Err(Error::InvalidSpec(format!(
            "coalitions support 1..=64 features, got {features}"
        )));
    }
    let weight_of = |size: usize| -> Result<T> {
        if size == 0 || size == features {
            Ok(T::zero())
        } else {
            kernel_weight(features, size)
        }
    };
    match budget {
        Budget::Full => {
            if features > FULL_ENUMERATION_LIMIT {
                return Err(Error::BudgetExceeded(format!(
                    "full enumeration of 2^{features} coalitions (limit 2^{FULL_ENUMERATION_LIMIT})"
                )));
            }
            (0..1u64 << features)
                .map(|mask| {
                    let coalition = Coalition::new(mask, features)?;
                    Ok(WeightedCoalition {
                        coalition,
                        weight: weight_of(coalition.size())?,
                    })
                })
                .collect()
        }
        Budget::Sampled(budget) => {
            if budget < features + 2 {
                return Err(Error::InvalidSpec(format!(
                    "coalition budget {budget} is below the minimum F+2 = {}",
                    features + 2
                )));
            }
            let mut out = vec![
                WeightedCoalition {
                    coalition: Coalition::empty(features)?,
                    weight: T::zero(),
                },
                WeightedCoalition {
                    coalition: Coalition::full(features)?,
                    weight: T::zero(),
                },
            ];
            let mut remaining = budget - 2;
            // Descending kernel weight; the symmetric tie s vs F−s resolves
            // to the smaller size first.
            let mut sizes: Vec<usize> = (1..features).collect();
            sizes.sort_by(|&a, &b| {
                let (wa, wb) = (
                    kernel_weight::<f64>(features, a).expect("interior size"),
                    kernel_weight::<f64>(features, b).expect("interior size"),
                );
                wb.partial_cmp(&wa).expect("finite weights").then(a.cmp(&b))
            });
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for size in sizes {
                if remaining == 0 {
                    break;
                }
                let class_size = binomial_u128(features, size);
                let base = kernel_weight::<T>(features, size)?;
                if class_size <= remaining as u128 {
                    let n = class_size as usize;
                    let mut mask = (1u64 << size) - 1;
                    for _ in 0..n {
                        out.push(WeightedCoalition {
                            coalition: Coalition::new(mask, features)?,
                            weight: base,
                        });
                        mask = next_same_size(mask);
                    }
                    remaining -= n;
                } else {
                    let take = remaining;
                    let multiplicity =
                        base * T::from_f64_lossy(class_size as f64 / take as f64);
                    for mask in sample_masks(&mut rng, features, size, take, class_size) {
                        out.push(WeightedCoalition {
                            coalition: Coalition::new(mask, features)?,
                            weight: multiplicity,
                        });
                    }
                    remaining = 0;
                }
            }
            Ok(out)
        }
    }
}

/// `take` distinct size-`size` masks over `features` bits, ascending, chosen
/// uniformly without replacement.
fn sample_masks(
    rng: &mut ChaCha8Rng,
    features: usize,
    size: usize,
    take: usize,
    class_size: u128,
) -> Vec<u64> {
    let mut chosen = BTreeSet::new();
    if 2 * take as u128 >= class_size {
        // Dense case: enumerate the class (≤ 2·take masks) and keep a
        // seeded partial shuffle's prefix.
        let mut all = Vec::with_capacity(class_size as usize);
        let mut mask = (1u64 << size) - 1;
        for _ in 0..class_size {
            all.push(mask);
            mask = next_same_size(mask);
        }
        for i in 0..take {
            let j = rng.gen_range(i..all.len());
            all.swap(i, j);
        }
        chosen.extend(all.into_iter().take(take));
    } else {
        // Sparse case: rejection-sample subsets (hit rate > 1/2 by the case
        // split) via a partial Fisher–Yates draw of `size` positions.
        let mut positions: Vec<usize> = (0..features).collect();
        while chosen.len() < take {
            for i in 0..size {
                let j = rng.gen_range(i..features);
                positions.swap(i, j);
            }
            let mask = positions[..size].iter().fold(0u64, |m, &p| m | 1 << p);
            chosen.insert(mask);
        }
    }
    chosen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kernel_weight_hand_values() {
        // F=4, s=2: 3/(6·2·2).
        assert_eq!(kernel_weight::<f64>(4, 2).unwrap(), 0.125);
        // F=3: both interior sizes weigh 1/3.
        let w1 = kernel_weight::<f64>(3, 1).unwrap();
        let w2 = kernel_weight::<f64>(3, 2).unwrap();
        assert_eq!(w1, 2.0 / 6.0);
        assert_eq!(w1, w2);
    }

    #[test]
    fn kernel_weight_endpoints_are_constraints() {
        for s in [0, 4, 5] {
            assert!(matches!(
                kernel_weight::<f64>(4, s),
                Err(Error::ConstraintCoalition { size, features: 4 }) if size == s
            ));
        }
    }

    #[test]
    fn binomials_are_exact() {
        assert_eq!(binomial_u128(4, 2), 6);
        assert_eq!(binomial_u128(10, 5), 252);
        assert_eq!(binomial_u128(25, 12), 5_200_300);
        assert_eq!(binomial_u128(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binomial_u128(7, 0), 1);
    }

    #[test]
    fn coalition_bit_accessors() {
        let c = Coalition::new(0b101, 3).unwrap();
        assert_eq!(c.size(), 2);
        assert!(c.contains(0) && !c.contains(1) && c.contains(2));
        assert!(!c.contains(7));
        assert!(Coalition::full(3).unwrap().is_full_set());
        assert!(Coalition::empty(3).unwrap().is_empty_set());
        assert!(Coalition::new(0b1000, 3).is_err());
        assert_eq!(c.with(1).unwrap().mask(), 0b111);
        assert!(c.with(3).is_err());
        assert_eq!(Coalition::full(64).unwrap().size(), 64);
    }

    #[test]
    fn full_mode_enumerates_everything() {
        let set = coalitions::<f64>(3, Budget::Full, 0).unwrap();
        assert_eq!(set.len(), 8);
        let masks: Vec<u64> = set.iter().map(|w| w.coalition.mask()).collect();
        assert_eq!(masks, (0..8).collect::<Vec<u64>>());
        // Endpoints carry weight zero; interior rows the kernel weight.
        for w in &set {
            let s = w.coalition.size();
            if s == 0 || s == 3 {
                assert_eq!(w.weight, 0.0);
            } else {
                assert_eq!(w.weight, kernel_weight::<f64>(3, s).unwrap());
            }
        }
    }

    #[test]
    fn full_mode_is_memory_guarded() {
        assert!(coalitions::<f64>(25, Budget::Full, 0).is_ok());
        assert!(matches!(
            coalitions::<f64>(26, Budget::Full, 0),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn sampled_mode_prefers_extreme_sizes() {
        let set = coalitions::<f64>(10, Budget::Sampled(22), 7).unwrap();
        assert_eq!(set.len(), 22);
        assert!(set[0].coalition.is_empty_set());
        assert!(set[1].coalition.is_full_set());
        let sizes: Vec<usize> = set[2..].iter().map(|w| w.coalition.size()).collect();
        assert_eq!(sizes.iter().filter(|&&s| s == 1).count(), 10);
        assert_eq!(sizes.iter().filter(|&&s| s == 9).count(), 10);
    }

    #[test]
    fn sampled_mode_minimum_budget() {
        assert!(matches!(
            coalitions::<f64>(10, Budget::Sampled(11), 0),
            Err(Error::InvalidSpec(_))
        ));
        assert!(coalitions::<f64>(10, Budget::Sampled(12), 0).is_ok());
    }

    #[test]
    fn sampled_mode_is_deterministic_and_seed_sensitive() {
        // F=6, budget 20: endpoints + sizes 1 and 5 fully (12), then 6 of
        // the 15 size-2 coalitions are sampled.
        let a = coalitions::<f64>(6, Budget::Sampled(20), 1).unwrap();
        let b = coalitions::<f64>(6, Budget::Sampled(20), 1).unwrap();
        let c = coalitions::<f64>(6, Budget::Sampled(20), 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        let tail: Vec<usize> = a[14..].iter().map(|w| w.coalition.size()).collect();
        assert_eq!(tail, vec![2; 6]);
        // The partial class keeps its total weight through multiplicities.
        let per = kernel_weight::<f64>(6, 2).unwrap();
        let total: f64 = a[14..].iter().map(|w| w.weight).sum();
        assert!((total - per * 15.0).abs() < 1e-12);
        // Larger budget than 2^F: everything enumerated, nothing repeated.
        let all = coalitions::<f64>(4, Budget::Sampled(1000), 3).unwrap();
        assert_eq!(all.len(), 16);
        let mut masks: Vec<u64> = all.iter().map(|w| w.coalition.mask()).collect();
        masks.sort_unstable();
        masks.dedup();
        assert_eq!(masks.len(), 16);
    }

    proptest! {
        #[test]
        fn kernel_weight_is_symmetric(f in 2usize..=20, s in 1usize..=19) {
            prop_assume!(s < f);
            let a = kernel_weight::<f64>(f, s).unwrap();
            let b = kernel_weight::<f64>(f, f - s).unwrap();
            prop_assert_eq!(a, b);
            prop_assert!(a > 0.0 && a.is_finite());
        }

        #[test]
        fn sampled_sets_have_unique_masks_and_exact_budget(
            f in 2usize..=12,
            extra in 0usize..40,
            seed in 0u64..1000,
        ) {
            let budget = f + 2 + extra;
            let set = coalitions::<f64>(f, Budget::Sampled(budget), seed).unwrap();
            let expected = budget.min(1 << f);
            prop_assert_eq!(set.len(), expected);
            let mut masks: Vec<u64> = set.iter().map(|w| w.coalition.mask()).collect();
            masks.sort_unstable();
            masks.dedup();
            prop_assert_eq!(masks.len(), expected);
        }
    }
}

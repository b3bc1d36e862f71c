//! Class ranking by labeled count and the rebalancing proportion formulas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Experiment arm. `Naive` trains the supervised baseline only; the other
/// two run generational self-training under the matching proportion formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "naive")]
    Naive,
    #[serde(rename = "ISDL")]
    Isdl,
    #[serde(rename = "ISDLplus")]
    IsdlPlus,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Naive => "naive",
            Variant::Isdl => "ISDL",
            Variant::IsdlPlus => "ISDLplus",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Classes ordered by labeled-set count, descending; rank 1 is the majority.
/// Ties order by ascending class index, so zero-count classes rank last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRanking {
    order: Vec<usize>,
    ranked_counts: Vec<usize>,
}

/// Builds the ranking from per-class counts (index = class).
pub fn rank_classes(counts: &[usize]) -> Result<ClassRanking> {
    if counts.len() < 2 {
        return Err(Error::InvalidSpec(format!(
            "ranking needs at least 2 classes, got {}",
            counts.len()
        )));
    }
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    let ranked_counts = order.iter().map(|&c| counts[c]).collect();
    Ok(ClassRanking {
        order,
        ranked_counts,
    })
}

impl ClassRanking {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Class index holding 1-based rank `l`.
    pub fn class_at_rank(&self, l: usize) -> usize {
        self.order[l - 1]
    }

    /// 1-based rank of a class index.
    pub fn rank_of_class(&self, class: usize) -> usize {
        1 + self
            .order
            .iter()
            .position(|&c| c == class)
            .expect("class index in range")
    }

    /// Ranked class indices, majority first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Counts along the ranking (nonincreasing).
    pub fn ranked_counts(&self) -> &[usize] {
        &self.ranked_counts
    }
}

fn check_ranked(counts_ranked: &[usize], l: usize) -> Result<()> {
    let len = counts_ranked.len();
    if len < 2 {
        return Err(Error::InvalidSpec(format!(
            "need at least 2 ranked counts, got {len}"
        )));
    }
    if counts_ranked.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidSpec(
            "ranked counts must be nonincreasing".into(),
        ));
    }
    if l == 0 || l > len {
        return Err(Error::InvalidSpec(format!(
            "rank {l} outside 1..={len}"
        )));
    }
    if counts_ranked[0] == 0 {
        return Err(Error::DegenerateCounts(
            "majority class count is zero".into(),
        ));
    }
    Ok(())
}

/// `x^α` with the boundary exponents exact: α=0 → 1, α=1 → x.
fn pow_alpha<T: Scalar>(base: T, alpha: T) -> T {
    if alpha == T::zero() {
        T::one()
    } else if alpha == T::one() {
        base
    } else {
        base.powf(alpha)
    }
}

/// Rebalancing proportion for 1-based rank `l`: `z_l = (N_{L+1−l}/N_1)^α`,
/// so the majority rank gets the minority count's share and vice versa.
pub fn proportion_isdl<T: Scalar>(counts_ranked: &[usize], l: usize, alpha: T) -> Result<T> {
    check_ranked(counts_ranked, l)?;
    let len = counts_ranked.len();
    let n1 = T::from_usize(counts_ranked[0]).expect("count fits scalar");
    let mirrored = T::from_usize(counts_ranked[len - l]).expect("count fits scalar");
    Ok(pow_alpha(mirrored / n1, alpha))
}

/// Refined proportion `z_l = ((N_{L+1−l} + (N_1 − N_l)) / (2·N_1))^α`:
/// halves the majority share at α=1 while keeping minority shares close to 1.
pub fn proportion_isdlplus<T: Scalar>(counts_ranked: &[usize], l: usize, alpha: T) -> Result<T> {
    check_ranked(counts_ranked, l)?;
    let len = counts_ranked.len();
    let numerator = counts_ranked[len - l] + (counts_ranked[0] - counts_ranked[l - 1]);
    let num = T::from_usize(numerator).expect("count fits scalar");
    let two_n1 = T::from_usize(2 * counts_ranked[0]).expect("count fits scalar");
    Ok(pow_alpha(num / two_n1, alpha))
}

/// The per-rank selection proportions an arm uses for one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSchedule<T: Scalar = f64> {
    pub alpha: T,
    pub variant: Variant,
    z: Vec<T>,
}

impl<T: Scalar> SamplingSchedule<T> {
    pub fn new(variant: Variant, alpha: T, ranking: &ClassRanking) -> Result<Self> {
        if !(alpha >= T::zero() && alpha.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "alpha must be a finite nonnegative real, got {alpha:?}"
            )));
        }
        let proportion = match variant {
            Variant::Isdl => proportion_isdl::<T>,
            Variant::IsdlPlus => proportion_isdlplus::<T>,
            Variant::Naive => {
                return Err(Error::InvalidSpec(
                    "the naive arm trains supervised only and has no sampling schedule".into(),
                ))
            }
        };
        let z = (1..=ranking.len())
            .map(|l| proportion(ranking.ranked_counts(), l, alpha))
            .collect::<Result<Vec<T>>>()?;
        Ok(SamplingSchedule { alpha, variant, z })
    }

    /// Proportions indexed by rank−1 (position 0 = majority).
    pub fn z(&self) -> &[T] {
        &self.z
    }

    /// Proportion at 1-based rank `l`.
    pub fn z_at_rank(&self, l: usize) -> T {
        self.z[l - 1]
    }
}

//! Kernel-based Shapley attribution for probabilistic classifiers.
//!
//! The pipeline: pick the explained features (raw dimensions, or pixel
//! groups via [`ExplainerConfig::grouping`]), enumerate or sample weighted
//! coalitions ([`coalitions`]), evaluate the model on background-masked
//! hybrids of the instance ([`mask_instance`]), and fit the constrained
//! weighted least-squares surrogate whose coefficients are the attributions
//! ([`solve_attribution`], driven end to end by [`explain`]).
//! [`exact_shapley`] is the subset-enumeration oracle the kernel path is
//! validated against, and [`render_heatmap`] broadcasts attributions back
//! onto an image grid.

mod coalition;
mod explain;
mod heatmap;
mod solve;

pub use coalition::{
    coalitions, kernel_weight, Budget, Coalition, WeightedCoalition, FULL_ENUMERATION_LIMIT,
};
pub use explain::{explain, explain_with};
pub use heatmap::{heatmap_grid, render_heatmap, tile_grouping};
pub use solve::{exact_shapley, exact_shapley_from_values, solve_attribution, EXACT_ORACLE_LIMIT};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// How an explanation treats the model input: the background rows that stand
/// in for "feature absent", an optional grouping of raw dimensions into
/// jointly-toggled features, the coalition budget, and the sampling seed.
#[derive(Debug, Clone)]
pub struct ExplainerConfig<T: Scalar = f64> {
    /// Reference rows substituted for masked-out features; model outputs are
    /// averaged over these rows.
    pub background: Matrix<T>,
    /// Optional partition of raw dimension indices into explained features;
    /// every member of a group is present or absent together. `None`
    /// explains each dimension on its own.
    pub grouping: Option<Vec<Vec<usize>>>,
    /// Full coalition enumeration, or a fixed evaluation budget.
    pub budget: Budget,
    /// Seed for coalition sampling; ignored under full enumeration.
    pub seed: u64,
}

impl<T: Scalar> ExplainerConfig<T> {
    /// Config with full enumeration, per-dimension features, and seed 0.
    pub fn new(background: Matrix<T>) -> Self {
        ExplainerConfig {
            background,
            grouping: None,
            budget: Budget::Full,
            seed: 0,
        }
    }

    /// Raw input dimensionality.
    pub fn dim(&self) -> usize {
        self.background.cols()
    }

    /// Number of explained features: groups when a grouping is set, raw
    /// dimensions otherwise.
    pub fn features(&self) -> usize {
        self.grouping.as_ref().map_or(self.dim(), Vec::len)
    }

    /// Checks that the background is nonempty and that the grouping, if
    /// present, partitions the raw dimensions exactly.
    pub fn validate(&self) -> Result<()> {
        if self.background.rows() == 0 || self.background.cols() == 0 {
            return Err(Error::EmptyDataset);
        }
        if let Some(groups) = &self.grouping {
            validate_partition(groups, self.dim())?;
        }
        Ok(())
    }

    /// Maps each raw dimension to the explained feature that toggles it.
    fn feature_of_dim(&self) -> Vec<usize> {
        match &self.grouping {
            None => (0..self.dim()).collect(),
            Some(groups) => {
                let mut map = vec![0usize; self.dim()];
                for (g, members) in groups.iter().enumerate() {
                    for &j in members {
                        map[j] = g;
                    }
                }
                map
            }
        }
    }
}

/// Additive attribution of one class's prediction: `base_value` is the
/// background expectation and `base_value` plus the sum of `phi` reproduces
/// the model output on the explained instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation<T: Scalar = f64> {
    /// Class index whose predicted probability is attributed.
    pub class: usize,
    /// Expected model output with every feature masked.
    pub base_value: T,
    /// Per-feature contributions, indexed like the explained features
    /// (groups when a grouping is set, raw dimensions otherwise).
    pub phi: Vec<T>,
}

/// Checks that `groups` partitions `0..n` exactly: no empty group, every
/// index in range, each index covered exactly once.
fn validate_partition(groups: &[Vec<usize>], n: usize) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::InvalidSpec("feature grouping has no groups".into()));
    }
    let mut seen = vec![false; n];
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::InvalidSpec(format!("feature group {g} is empty")));
        }
        for &j in members {
            if j >= n {
                return Err(Error::InvalidSpec(format!(
                    "feature group {g} references index {j}, but there are only {n}"
                )));
            }
            if seen[j] {
                return Err(Error::InvalidSpec(format!(
                    "index {j} appears in more than one feature group"
                )));
            }
            seen[j] = true;
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidSpec(format!(
            "index {missing} is not covered by any feature group"
        )));
    }
    Ok(())
}

/// Builds the model-evaluation rows for one coalition: every background row,
/// with the dimensions belonging to the coalition's features replaced by the
/// instance values.
pub fn mask_instance<T: Scalar>(
    x: &[T],
    cfg: &ExplainerConfig<T>,
    coalition: &Coalition,
) -> Result<Matrix<T>> {
    cfg.validate()?;
    if x.len() != cfg.dim() {
        return Err(Error::ShapeError(format!(
            "instance has {} dimensions, background has {}",
            x.len(),
            cfg.dim()
        )));
    }
    if coalition.features() != cfg.features() {
        return Err(Error::ShapeError(format!(
            "coalition is over {} features, config explains {}",
            coalition.features(),
            cfg.features()
        )));
    }
    let feature_of = cfg.feature_of_dim();
    let mut out = Matrix::zeros(cfg.background.rows(), cfg.dim());
    for r in 0..cfg.background.rows() {
        for (j, &xj) in x.iter().enumerate() {
            let v = if coalition.contains(feature_of[j]) {
                xj
            } else {
                cfg.background.get(r, j)
            };
            out.set(r, j, v);
        }
    }
    Ok(out)
}

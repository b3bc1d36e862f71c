//! The end-to-end attribution driver: coalition enumeration, batched model
//! evaluation over background-masked rows, and the constrained solve, for
//! the top predicted classes of one instance.

use crate::classifier::Classifier;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::shap::coalition::coalitions;
use crate::shap::solve::solve_attribution;
use crate::shap::{ExplainerConfig, Explanation};

/// Explains `model.predict_proba` at `instance` for its `top_n` most
/// probable classes. See [`explain_with`] for the contract.
pub fn explain<T: Scalar, M: Classifier<T>>(
    model: &M,
    instance: &[T],
    cfg: &ExplainerConfig<T>,
    top_n: usize,
) -> Result<Vec<Explanation<T>>> {
    explain_with(|rows| model.predict_proba(rows), instance, cfg, top_n)
}

/// Attributes the predicted probability of each of the instance's `top_n`
/// classes (highest probability first, ties to the lower class index) across
/// the explained features.
///
/// `predict` is called exactly once, on every coalition's background-masked
/// rows stacked into a single matrix; per-coalition model values are the
/// means over the background rows. Each returned explanation satisfies
/// `base_value + phi.sum() == p_class(instance)` up to solver arithmetic.
pub fn explain_with<T: Scalar>(
    predict: impl Fn(&Matrix<T>) -> Result<Matrix<T>>,
    instance: &[T],
    cfg: &ExplainerConfig<T>,
    top_n: usize,
) -> Result<Vec<Explanation<T>>> {
    cfg.validate()?;
    if instance.len() != cfg.dim() {
        return Err(Error::ShapeError(format!(
            "instance has {} dimensions, background has {}",
            instance.len(),
            cfg.dim()
        )));
    }
    let features = cfg.features();
    let set = coalitions::<T>(features, cfg.budget, cfg.seed)?;
    let feature_of = cfg.feature_of_dim();
    let bg = &cfg.background;

    // One stacked evaluation batch: |set| blocks of the background rows,
    // each block masked by its coalition.
    let mut batch = Matrix::zeros(set.len() * bg.rows(), cfg.dim());
    for (k, wc) in set.iter().enumerate() {
        for r in 0..bg.rows() {
            let out_row = k * bg.rows() + r;
            for (j, &xj) in instance.iter().enumerate() {
                let v = if wc.coalition.contains(feature_of[j]) {
                    xj
                } else {
                    bg.get(r, j)
                };
                batch.set(out_row, j, v);
            }
        }
    }
    let probs = predict(&batch)?;
    if probs.rows() != batch.rows() {
        return Err(Error::ShapeError(format!(
            "model returned {} rows for {} inputs",
            probs.rows(),
            batch.rows()
        )));
    }
    let classes = probs.cols();
    if top_n == 0 || top_n > classes {
        return Err(Error::InvalidSpec(format!(
            "top_n must be in 1..={classes}, got {top_n}"
        )));
    }

    // Mean model output per coalition, one series per class.
    let denom = T::from_f64_lossy(bg.rows() as f64);
    let mut f_by_class = vec![vec![T::zero(); set.len()]; classes];
    for k in 0..set.len() {
        for c in 0..classes {
            let mut acc = T::zero();
            for r in 0..bg.rows() {
                acc += probs.get(k * bg.rows() + r, c);
            }
            f_by_class[c][k] = acc / denom;
        }
    }

    let empty_idx = set
        .iter()
        .position(|wc| wc.coalition.is_empty_set())
        .expect("every coalition set contains the empty set");
    let full_idx = set
        .iter()
        .position(|wc| wc.coalition.is_full_set())
        .expect("every coalition set contains the full set");

    // Rank classes by predicted probability on the instance itself (the
    // full-coalition block is the instance replicated over the background).
    let mut order: Vec<usize> = (0..classes).collect();
    order.sort_by(|&a, &b| {
        f_by_class[b][full_idx]
            .partial_cmp(&f_by_class[a][full_idx])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    order[..top_n]
        .iter()
        .map(|&c| {
            let f = &f_by_class[c];
            let (base_value, phi) =
                solve_attribution(&set, f, features, f[empty_idx], f[full_idx])?;
            Ok(Explanation {
                class: c,
                base_value,
                phi,
            })
        })
        .collect()
}

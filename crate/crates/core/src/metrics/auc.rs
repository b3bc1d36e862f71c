//! ROC curves and area-under-curve by threshold sweep.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fmt::g8;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// One operating point of a ROC curve at a given score threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint<T: Scalar = f64> {
    pub fpr: T,
    pub tpr: T,
    pub threshold: T,
}

fn validate_binary<T: Scalar>(scores: &[T], positives: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != positives.len() {
        return Err(Error::ShapeError(format!(
            "{} scores vs {} flags",
            scores.len(),
            positives.len()
        )));
    }
    let pos = positives.iter().filter(|p| **p).count();
    let neg = positives.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::UndefinedAUC(format!(
            "need both outcomes, got {pos} positive / {neg} negative"
        )));
    }
    Ok((pos, neg))
}

/// Descending distinct score groups with their (positive, negative) tallies.
fn tie_groups<T: Scalar>(scores: &[T], positives: &[bool]) -> Vec<(T, usize, usize)> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must not be NaN")
    });
    let mut groups: Vec<(T, usize, usize)> = Vec::new();
    for &i in &order {
        match groups.last_mut() {
            Some((s, pos, neg)) if *s == scores[i] => {
                if positives[i] {
                    *pos += 1;
                } else {
                    *neg += 1;
                }
            }
            _ => groups.push((
                scores[i],
                usize::from(positives[i]),
                usize::from(!positives[i]),
            )),
        }
    }
    groups
}

/// Area under the one-vs-rest ROC curve: Mann–Whitney concordance with ties
/// earning half credit, computed as the trapezoidal area of the sweep.
pub fn roc_auc<T: Scalar>(scores: &[T], positives: &[bool]) -> Result<T> {
    let (pos, neg) = validate_binary(scores, positives)?;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut area = 0.0f64;
    for (_, gp, gn) in tie_groups(scores, positives) {
        // Trapezoid over the tie block credits pos/neg ties with 1/2 each.
        area += gn as f64 * (tp as f64 + gp as f64 / 2.0);
        tp += gp;
        fp += gn;
    }
    debug_assert_eq!((tp, fp), (pos, neg));
    Ok(T::from_f64_lossy(area / (pos as f64 * neg as f64)))
}

/// The swept ROC curve. The first point is `(0, 0)` at threshold +∞; each
/// subsequent point lowers the threshold to the next distinct score.
pub fn roc_curve<T: Scalar>(scores: &[T], positives: &[bool]) -> Result<Vec<RocPoint<T>>> {
    let (pos, neg) = validate_binary(scores, positives)?;
    let mut points = vec![RocPoint {
        fpr: T::zero(),
        tpr: T::zero(),
        threshold: T::infinity(),
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    for (score, gp, gn) in tie_groups(scores, positives) {
        tp += gp;
        fp += gn;
        points.push(RocPoint {
            fpr: T::from_f64_lossy(fp as f64 / neg as f64),
            tpr: T::from_f64_lossy(tp as f64 / pos as f64),
            threshold: score,
        });
    }
    Ok(points)
}

/// Writes `fpr,tpr,threshold` rows.
pub fn write_roc_csv<T: Scalar>(points: &[RocPoint<T>], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("fpr,tpr,threshold\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            g8(p.fpr.as_f64()),
            g8(p.tpr.as_f64()),
            g8(p.threshold.as_f64())
        ));
    }
    std::fs::write(path, out).map_err(|e| Error::file_io(path, e))
}

/// One-vs-rest AUC per class from a probability matrix; `None` marks classes
/// for which AUC is undefined (absent from truth, or the only class present).
pub fn per_class_auc<T: Scalar>(probs: &Matrix<T>, truth: &[usize]) -> Result<Vec<Option<T>>> {
    if probs.rows() != truth.len() {
        return Err(Error::ShapeError(format!(
            "{} probability rows vs {} labels",
            probs.rows(),
            truth.len()
        )));
    }
    let classes = probs.cols();
    if let Some(&bad) = truth.iter().find(|&&y| y >= classes) {
        return Err(Error::LabelOutOfRange {
            label: bad,
            classes,
        });
    }
    (0..classes)
        .map(|c| {
            let scores: Vec<T> = (0..probs.rows()).map(|i| probs.row(i)[c]).collect();
            let positives: Vec<bool> = truth.iter().map(|&y| y == c).collect();
            match roc_auc(&scores, &positives) {
                Ok(v) => Ok(Some(v)),
                Err(Error::UndefinedAUC(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Mean of the defined one-vs-rest AUCs; `None` when every class is
/// undefined (single-class truth).
pub fn macro_auc<T: Scalar>(probs: &Matrix<T>, truth: &[usize]) -> Result<Option<T>> {
    let per_class = per_class_auc(probs, truth)?;
    let defined: Vec<T> = per_class.into_iter().flatten().collect();
    if defined.is_empty() {
        return Ok(None);
    }
    let n = T::from_usize(defined.len()).expect("class count fits scalar");
    Ok(Some(defined.into_iter().sum::<T>() / n))
}

//! Multiclass evaluation: confusion matrix, one-vs-rest rates, macro
//! averages, ROC/AUC, and top-k accuracy.

mod auc;

pub use auc::{macro_auc, per_class_auc, roc_auc, roc_curve, write_roc_csv, RocPoint};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classifier::argmax;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// L×L count matrix; rows index truth, columns index prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<usize>,
}

/// One-vs-rest reduction of one class: (TP, FN, FP, TN).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OneVsRest {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn new(classes: usize) -> Self {
        ConfusionMatrix {
            classes,
            counts: vec![0; classes * classes],
        }
    }

    /// Tallies truth/prediction pairs; both label vectors must use indices
    /// below `classes`.
    pub fn from_predictions(truth: &[usize], pred: &[usize], classes: usize) -> Result<Self> {
        if truth.len() != pred.len() {
            return Err(Error::ShapeError(format!(
                "{} truth labels vs {} predictions",
                truth.len(),
                pred.len()
            )));
        }
        let mut cm = ConfusionMatrix::new(classes);
        for (&t, &p) in truth.iter().zip(pred) {
            for label in [t, p] {
                if label >= classes {
                    return Err(Error::LabelOutOfRange { label, classes });
                }
            }
            cm.counts[t * classes + p] += 1;
        }
        Ok(cm)
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, truth: usize, pred: usize) -> usize {
        self.counts[truth * self.classes + pred]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.classes).map(|c| self.get(c, c)).sum()
    }

    /// TP/FN/FP/TN for one class against the rest.
    pub fn one_vs_rest(&self, class: usize) -> OneVsRest {
        let tp = self.get(class, class);
        let row: usize = (0..self.classes).map(|j| self.get(class, j)).sum();
        let col: usize = (0..self.classes).map(|i| self.get(i, class)).sum();
        // row + col − tp = |truth-c ∪ pred-c| ≤ total, so this cannot underflow.
        OneVsRest {
            tp,
            fn_: row - tp,
            fp: col - tp,
            tn: self.total() + tp - row - col,
        }
    }
}

fn ratio<T: Scalar>(num: usize, den: usize) -> Option<T> {
    if den == 0 {
        return None;
    }
    Some(
        T::from_usize(num).expect("count fits scalar")
            / T::from_usize(den).expect("count fits scalar"),
    )
}

/// Fraction of samples on the diagonal.
pub fn accuracy<T: Scalar>(cm: &ConfusionMatrix) -> Result<T> {
    ratio(cm.trace(), cm.total()).ok_or(Error::EmptyDataset)
}

/// Per-class recall `TP/(TP+FN)`; `None` where the class has no truth support.
pub fn per_class_sensitivity<T: Scalar>(cm: &ConfusionMatrix) -> Vec<Option<T>> {
    (0..cm.classes())
        .map(|c| {
            let r = cm.one_vs_rest(c);
            ratio(r.tp, r.tp + r.fn_)
        })
        .collect()
}

/// Per-class true-negative rate `TN/(FP+TN)`; `None` where every sample
/// belongs to the class (no negatives exist).
pub fn per_class_specificity<T: Scalar>(cm: &ConfusionMatrix) -> Vec<Option<T>> {
    (0..cm.classes())
        .map(|c| {
            let r = cm.one_vs_rest(c);
            ratio(r.tn, r.fp + r.tn)
        })
        .collect()
}

/// Per-class F1 `2PR/(P+R)`. Undefined (`None`) when precision or recall is
/// undefined; 0 when both are defined but zero.
pub fn per_class_f1<T: Scalar>(cm: &ConfusionMatrix) -> Vec<Option<T>> {
    (0..cm.classes())
        .map(|c| {
            let r = cm.one_vs_rest(c);
            let precision = ratio::<T>(r.tp, r.tp + r.fp)?;
            let recall = ratio::<T>(r.tp, r.tp + r.fn_)?;
            let denom = precision + recall;
            if denom == T::zero() {
                Some(T::zero())
            } else {
                Some((T::one() + T::one()) * precision * recall / denom)
            }
        })
        .collect()
}

fn macro_mean<T: Scalar>(values: &[Option<T>], what: &str) -> Result<T> {
    let defined: Vec<T> = values.iter().copied().flatten().collect();
    if defined.is_empty() {
        return Err(Error::UndefinedMetric(format!(
            "{what} is undefined for every class"
        )));
    }
    let n = T::from_usize(defined.len()).expect("class count fits scalar");
    Ok(defined.into_iter().sum::<T>() / n)
}

/// Mean per-class recall over classes with truth support.
pub fn macro_sensitivity<T: Scalar>(cm: &ConfusionMatrix) -> Result<T> {
    macro_mean(&per_class_sensitivity(cm), "sensitivity")
}

/// Mean per-class true-negative rate over classes with any negatives.
pub fn macro_specificity<T: Scalar>(cm: &ConfusionMatrix) -> Result<T> {
    macro_mean(&per_class_specificity(cm), "specificity")
}

/// Mean per-class F1 over classes where it is defined.
pub fn macro_f1<T: Scalar>(cm: &ConfusionMatrix) -> Result<T> {
    macro_mean(&per_class_f1(cm), "F1")
}

/// Fraction of rows whose true label sits among the `k` highest
/// probabilities; ties at the k-th value resolve by ascending class index.
pub fn top_k_accuracy<T: Scalar>(probs: &Matrix<T>, truth: &[usize], k: usize) -> Result<T> {
    let classes = probs.cols();
    if k == 0 || k > classes {
        return Err(Error::InvalidSpec(format!(
            "top-k needs 1 ≤ k ≤ {classes}, got {k}"
        )));
    }
    if probs.rows() != truth.len() {
        return Err(Error::ShapeError(format!(
            "{} probability rows vs {} labels",
            probs.rows(),
            truth.len()
        )));
    }
    if probs.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for (i, &y) in truth.iter().enumerate() {
        if y >= classes {
            return Err(Error::LabelOutOfRange {
                label: y,
                classes,
            });
        }
        let row = probs.row(i);
        let mut order: Vec<usize> = (0..classes).collect();
        // Descending probability, ascending index among ties.
        order.sort_by(|&a, &b| {
            row[b]
                .partial_cmp(&row[a])
                .expect("probabilities must not be NaN")
                .then(a.cmp(&b))
        });
        if order[..k].contains(&y) {
            hits += 1;
        }
    }
    Ok(ratio(hits, truth.len()).expect("nonempty"))
}

/// Classes whose per-metric value was undefined and therefore left out of
/// the corresponding macro mean.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedClasses {
    pub sensitivity: Vec<usize>,
    pub specificity: Vec<usize>,
    pub f1: Vec<usize>,
    pub auc: Vec<usize>,
}

/// The full evaluation bundle for one prediction set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport<T: Scalar = f64> {
    pub accuracy: T,
    pub macro_sensitivity: T,
    pub macro_specificity: T,
    pub macro_f1: T,
    pub per_class_sensitivity: Vec<Option<T>>,
    pub per_class_specificity: Vec<Option<T>>,
    pub per_class_f1: Vec<Option<T>>,
    pub per_class_auc: Vec<Option<T>>,
    /// `None` only when truth contains a single class.
    pub macro_auc: Option<T>,
    pub top_k_accuracy: BTreeMap<usize, T>,
    pub excluded_classes: ExcludedClasses,
}

fn undefined_indices<T: Scalar>(values: &[Option<T>]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.is_none().then_some(i))
        .collect()
}

impl<T: Scalar> MetricsReport<T> {
    /// Evaluates probability predictions against truth. Hard labels are the
    /// per-row argmax; `ks` lists the top-k accuracies to include.
    pub fn from_probabilities(probs: &Matrix<T>, truth: &[usize], ks: &[usize]) -> Result<Self> {
        let pred: Vec<usize> = (0..probs.rows()).map(|i| argmax(probs.row(i))).collect();
        let cm = ConfusionMatrix::from_predictions(truth, &pred, probs.cols())?;
        let per_sens = per_class_sensitivity(&cm);
        let per_spec = per_class_specificity(&cm);
        let per_f1 = per_class_f1(&cm);
        let per_auc = per_class_auc(probs, truth)?;
        let mut top_k = BTreeMap::new();
        for &k in ks {
            top_k.insert(k, top_k_accuracy(probs, truth, k)?);
        }
        Ok(MetricsReport {
            accuracy: accuracy(&cm)?,
            macro_sensitivity: macro_sensitivity(&cm)?,
            macro_specificity: macro_specificity(&cm)?,
            macro_f1: macro_f1(&cm)?,
            excluded_classes: ExcludedClasses {
                sensitivity: undefined_indices(&per_sens),
                specificity: undefined_indices(&per_spec),
                f1: undefined_indices(&per_f1),
                auc: undefined_indices(&per_auc),
            },
            per_class_sensitivity: per_sens,
            per_class_specificity: per_spec,
            per_class_f1: per_f1,
            macro_auc: macro_auc(probs, truth)?,
            per_class_auc: per_auc,
            top_k_accuracy: top_k,
        })
    }
}

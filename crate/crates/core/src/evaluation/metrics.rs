//! Confusion-matrix derived diagnostic metrics.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One-vs-rest confusion counts for a single class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagnosticMetrics {
    pub accuracy: f64,
    /// `None` when `TP + FN = 0`.
    pub sensitivity: Option<f64>,
    /// `None` when `TN + FP = 0`.
    pub specificity: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn confusion_metrics(tp: usize, tn: usize, fp: usize, fn_: usize) -> Result<DiagnosticMetrics> {
    let total = tp + tn + fp + fn_;
    if total == 0 {
        return Err(invalid("confusion matrix is empty"));
    }
    Ok(DiagnosticMetrics {
        accuracy: (tp + tn) as f64 / total as f64,
        sensitivity: ratio(tp, tp + fn_),
        specificity: ratio(tn, tn + fp),
    })
}

/// Per-class one-vs-rest counts from paired truth/prediction ids.
pub fn one_vs_rest(truth: &[usize], predicted: &[usize], n_classes: usize) -> Vec<ConfusionCounts> {
    let mut out = vec![ConfusionCounts::default(); n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        for (c, counts) in out.iter_mut().enumerate() {
            match (t == c, p == c) {
                (true, true) => counts.tp += 1,
                (false, false) => counts.tn += 1,
                (false, true) => counts.fp += 1,
                (true, false) => counts.fn_ += 1,
            }
        }
    }
    out
}

/// Mean of the defined values; `None` if none are defined.
pub fn macro_mean(values: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let defined: Vec<f64> = values.into_iter().flatten().collect();
    (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
}

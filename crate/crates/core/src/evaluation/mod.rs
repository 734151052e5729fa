//! Wrapper fitness: a k-NN classifier trained on the selected features and
//! scored on the held-out split.

mod dataset;
mod knn;
mod metrics;
pub mod synthetic;

pub use dataset::{
    load_csv, normalize_min_max, read_csv, split, CsvOptions, Dataset, MinMaxScaler, SplitDataset,
    MIN_SPLIT_INSTANCES,
};
pub use knn::knn_predict;
pub use metrics::{confusion_metrics, macro_mean, one_vs_rest, ConfusionCounts, DiagnosticMetrics};

use serde::{Deserialize, Serialize};

use crate::binary::FeatureMask;
use crate::error::{invalid, Result};
use crate::population::Objective;

/// Default neighbour count.
pub const DEFAULT_K: usize = 5;

/// Weights of classification error and subset size in the fitness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessWeights {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for FitnessWeights {
    fn default() -> Self {
        Self {
            alpha: 0.99,
            beta: 0.01,
        }
    }
}

impl FitnessWeights {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 0.0 || self.beta < 0.0 || (self.alpha + self.beta - 1.0).abs() > 1e-9 {
            return Err(invalid(format!(
                "fitness weights must be non-negative and sum to 1, got alpha={} beta={}",
                self.alpha, self.beta
            )));
        }
        Ok(())
    }

    /// `alpha · err + beta · selected / total`.
    pub fn fitness(&self, error_rate: f64, selected: usize, total: usize) -> f64 {
        self.alpha * error_rate + self.beta * selected as f64 / total as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub mask: FeatureMask,
    pub fitness: f64,
    pub error_rate: f64,
    pub selected_count: usize,
    pub total_features: usize,
    pub correct: usize,
    pub total: usize,
    /// One-vs-rest counts per class id.
    pub confusion: Vec<ConfusionCounts>,
    pub accuracy: f64,
    /// Class 1 as positive for two-class data, macro-averaged otherwise.
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

impl EvalResult {
    /// Counts reported for the positive class of a two-class problem.
    pub fn positive_counts(&self) -> Option<ConfusionCounts> {
        (self.confusion.len() == 2).then(|| self.confusion[1])
    }
}

/// Classifies every test row with k-NN over the masked features and scores
/// the mask.
pub fn evaluate(
    mask: &FeatureMask,
    split: &SplitDataset,
    weights: FitnessWeights,
    k: usize,
) -> Result<EvalResult> {
    knn::check(&split.train, mask, k)?;
    let test = &split.test;
    let mut model = knn::MaskedTrain::new(&split.train, mask);
    let predicted: Vec<usize> = (0..test.n_instances())
        .map(|i| model.predict(test.row(i), k))
        .collect();

    let total = test.n_instances();
    let correct = predicted
        .iter()
        .zip(test.labels())
        .filter(|(p, t)| p == t)
        .count();
    let error_rate = (total - correct) as f64 / total as f64;
    let n_classes = split.train.n_classes().max(test.n_classes());
    let confusion = one_vs_rest(test.labels(), &predicted, n_classes);

    let (sensitivity, specificity) = if n_classes == 2 {
        let c = confusion[1];
        let m = confusion_metrics(c.tp, c.tn, c.fp, c.fn_)?;
        (m.sensitivity, m.specificity)
    } else {
        let per_class = confusion
            .iter()
            .map(|c| confusion_metrics(c.tp, c.tn, c.fp, c.fn_))
            .collect::<Result<Vec<_>>>()?;
        (
            macro_mean(per_class.iter().map(|m| m.sensitivity)),
            macro_mean(per_class.iter().map(|m| m.specificity)),
        )
    };

    let selected_count = mask.count();
    Ok(EvalResult {
        mask: mask.clone(),
        fitness: weights.fitness(error_rate, selected_count, mask.len()),
        error_rate,
        selected_count,
        total_features: mask.len(),
        correct,
        total,
        confusion,
        accuracy: correct as f64 / total as f64,
        sensitivity,
        specificity,
    })
}

/// Fitness oracle bound to one split.
#[derive(Clone, Debug)]
pub struct KnnEvaluator {
    pub split: SplitDataset,
    pub weights: FitnessWeights,
    pub k: usize,
}

impl KnnEvaluator {
    pub fn new(split: SplitDataset, weights: FitnessWeights, k: usize) -> Result<Self> {
        weights.validate()?;
        if k == 0 || k > split.train.n_instances() {
            return Err(crate::Error::KTooLarge {
                k,
                train: split.train.n_instances(),
            });
        }
        Ok(Self { split, weights, k })
    }

    pub fn evaluate(&self, mask: &FeatureMask) -> Result<EvalResult> {
        evaluate(mask, &self.split, self.weights, self.k)
    }

    pub fn n_features(&self) -> usize {
        self.split.train.n_features()
    }
}

impl Objective for KnnEvaluator {
    fn fitness(&mut self, mask: &FeatureMask) -> Result<f64> {
        Ok(self.evaluate(mask)?.fitness)
    }
}

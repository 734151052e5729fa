//! Aggregation of per-run metrics into mean / std / best / worst.

use serde::{Deserialize, Serialize};

use super::runner::RunRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    Sensitivity,
    Specificity,
    Fitness,
    SelectedCount,
    Time,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Accuracy,
        Metric::Sensitivity,
        Metric::Specificity,
        Metric::Fitness,
        Metric::SelectedCount,
        Metric::Time,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Sensitivity => "sensitivity",
            Metric::Specificity => "specificity",
            Metric::Fitness => "fitness",
            Metric::SelectedCount => "selected_count",
            Metric::Time => "time",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Metric::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Higher is better.
    pub fn is_benefit(self) -> bool {
        matches!(
            self,
            Metric::Accuracy | Metric::Sensitivity | Metric::Specificity
        )
    }

    /// Value for one run; `None` when the metric is undefined for that run.
    pub fn of(self, r: &RunRecord) -> Option<f64> {
        match self {
            Metric::Accuracy => Some(r.best.accuracy),
            Metric::Sensitivity => r.best.sensitivity,
            Metric::Specificity => r.best.specificity,
            Metric::Fitness => Some(r.best.fitness),
            Metric::SelectedCount => Some(r.best.selected_count as f64),
            Metric::Time => Some(r.wall_time_secs),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub best: f64,
    pub worst: f64,
}

impl MetricStats {
    /// `None` for an empty sample.
    pub fn from_values(values: &[f64], higher_is_better: bool) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (best, worst) = if higher_is_better {
            (max, min)
        } else {
            (min, max)
        };
        Some(Self {
            mean,
            std: var.sqrt(),
            best,
            worst,
        })
    }
}

/// Statistics per metric; `None` where no run had a defined value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub metrics: Vec<(Metric, Option<MetricStats>)>,
}

impl SummaryStats {
    pub fn from_records(records: &[RunRecord]) -> Self {
        let metrics = Metric::ALL
            .into_iter()
            .map(|m| {
                let values: Vec<f64> = records.iter().filter_map(|r| m.of(r)).collect();
                (m, MetricStats::from_values(&values, m.is_benefit()))
            })
            .collect();
        Self { metrics }
    }

    pub fn get(&self, metric: Metric) -> Option<&MetricStats> {
        self.metrics
            .iter()
            .find(|(m, _)| *m == metric)
            .and_then(|(_, s)| s.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std_of_one_two_three() {
        let s = MetricStats::from_values(&[1.0, 2.0, 3.0], false).unwrap();
        assert_eq!(s.mean, 2.0);
        assert!((s.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.std - 0.8165).abs() < 1e-4);
        assert_eq!((s.best, s.worst), (1.0, 3.0));
        let b = MetricStats::from_values(&[1.0, 2.0, 3.0], true).unwrap();
        assert_eq!((b.best, b.worst), (3.0, 1.0));
    }

    #[test]
    fn single_sample() {
        let s = MetricStats::from_values(&[0.42], true).unwrap();
        assert_eq!((s.mean, s.std, s.best, s.worst), (0.42, 0.0, 0.42, 0.42));
        assert!(MetricStats::from_values(&[], true).is_none());
    }
}

//! Brute-force k-nearest-neighbour classification over a feature subset.

use crate::binary::FeatureMask;
use crate::error::{Error, Result};

use super::dataset::Dataset;

/// Predicts the class of `query` by majority vote among the `k` training rows
/// nearest in Euclidean distance over the selected features.
///
/// Equal distances rank the lower training index first. A tied vote goes to
/// the tied class whose member appears earliest in that neighbour order,
/// i.e. the nearest neighbour's class whenever it is among the tied ones.
pub fn knn_predict(train: &Dataset, query: &[f64], mask: &FeatureMask, k: usize) -> Result<usize> {
    check(train, mask, k)?;
    Ok(MaskedTrain::new(train, mask).predict(query, k))
}

pub(crate) fn check(train: &Dataset, mask: &FeatureMask, k: usize) -> Result<()> {
    if mask.len() != train.n_features() {
        return Err(Error::MaskLength {
            expected: train.n_features(),
            found: mask.len(),
        });
    }
    if mask.count() == 0 {
        return Err(Error::EmptyMask);
    }
    if k == 0 || k > train.n_instances() {
        return Err(Error::KTooLarge {
            k,
            train: train.n_instances(),
        });
    }
    Ok(())
}

/// Training rows restricted to the selected columns, stored column-major so
/// the distance accumulation runs over contiguous memory.
pub(crate) struct MaskedTrain<'a> {
    train: &'a Dataset,
    cols: Vec<usize>,
    columns: Vec<f64>,
    dist: Vec<f64>,
    nearest: Vec<(f64, usize)>,
    votes: Vec<usize>,
}

impl<'a> MaskedTrain<'a> {
    pub(crate) fn new(train: &'a Dataset, mask: &FeatureMask) -> Self {
        let n = train.n_instances();
        let cols = mask.indices();
        let mut columns = Vec::with_capacity(cols.len() * n);
        for &j in &cols {
            columns.extend((0..n).map(|i| train.row(i)[j]));
        }
        Self {
            train,
            cols,
            columns,
            dist: vec![0.0; n],
            nearest: Vec::new(),
            votes: vec![0; train.n_classes()],
        }
    }

    pub(crate) fn predict(&mut self, query: &[f64], k: usize) -> usize {
        let n = self.train.n_instances();
        // Squared distances; same ordering as Euclidean.
        self.dist.iter_mut().for_each(|d| *d = 0.0);
        for (slot, &j) in self.cols.iter().enumerate() {
            let q = query[j];
            let column = &self.columns[slot * n..(slot + 1) * n];
            for (d, &x) in self.dist.iter_mut().zip(column) {
                let diff = q - x;
                *d += diff * diff;
            }
        }

        // k smallest by (distance, index); scanning in index order and
        // inserting only on strict improvement keeps lower indices on ties.
        self.nearest.clear();
        for (i, &d) in self.dist.iter().enumerate() {
            if self.nearest.len() == k {
                if d >= self.nearest[k - 1].0 {
                    continue;
                }
                self.nearest.pop();
            }
            let at = self.nearest.partition_point(|&(e, _)| e <= d);
            self.nearest.insert(at, (d, i));
        }

        self.votes.iter_mut().for_each(|v| *v = 0);
        for &(_, i) in &self.nearest {
            self.votes[self.train.label(i)] += 1;
        }
        let top = *self.votes.iter().max().expect("at least one class");
        self.nearest
            .iter()
            .map(|&(_, i)| self.train.label(i))
            .find(|&c| self.votes[c] == top)
            .expect("a neighbour carries the winning class")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[[f64; 2]], labels: &[usize]) -> Dataset {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        Dataset::from_rows(&rows, labels.to_vec()).unwrap()
    }

    #[test]
    fn exact_match_with_k1() {
        let train = ds(&[[0.0, 0.0], [1.0, 1.0], [0.5, 0.2]], &[0, 1, 1]);
        let all = FeatureMask::all(2);
        for i in 0..3 {
            assert_eq!(
                knn_predict(&train, train.row(i), &all, 1).unwrap(),
                train.label(i)
            );
        }
    }

    #[test]
    fn masked_dimension_is_ignored() {
        // Feature 0 separates classes, feature 1 points the other way.
        let train = ds(
            &[[0.0, 1.0], [0.1, 0.9], [1.0, 0.0], [0.9, 0.1]],
            &[0, 0, 1, 1],
        );
        let q = [0.05, 0.05];
        assert_eq!(
            knn_predict(&train, &q, &FeatureMask::from_indices(2, &[0]), 1).unwrap(),
            0
        );
        assert_eq!(
            knn_predict(&train, &q, &FeatureMask::from_indices(2, &[1]), 1).unwrap(),
            1
        );
    }

    #[test]
    fn distance_tie_prefers_lower_index() {
        let train = ds(&[[1.0, 0.0], [-1.0, 0.0]], &[1, 0]);
        assert_eq!(
            knn_predict(&train, &[0.0, 0.0], &FeatureMask::all(2), 1).unwrap(),
            1
        );
    }

    #[test]
    fn vote_tie_goes_to_nearest_neighbour_class() {
        let train = ds(
            &[[0.3, 0.0], [0.1, 0.0], [0.2, 0.0], [0.4, 0.0]],
            &[0, 1, 0, 1],
        );
        // Two votes each; row 1 (class 1) is nearest.
        assert_eq!(
            knn_predict(&train, &[0.0, 0.0], &FeatureMask::all(2), 4).unwrap(),
            1
        );
    }

    #[test]
    fn argument_errors() {
        let train = ds(&[[0.0, 0.0], [1.0, 1.0]], &[0, 1]);
        let q = [0.0, 0.0];
        assert!(matches!(
            knn_predict(&train, &q, &FeatureMask::all(2), 3),
            Err(Error::KTooLarge { .. })
        ));
        assert!(matches!(
            knn_predict(&train, &q, &FeatureMask::all(2), 0),
            Err(Error::KTooLarge { .. })
        ));
        assert!(matches!(
            knn_predict(&train, &q, &FeatureMask::new(vec![false, false]), 1),
            Err(Error::EmptyMask)
        ));
        assert!(matches!(
            knn_predict(&train, &q, &FeatureMask::all(3), 1),
            Err(Error::MaskLength { .. })
        ));
    }
}

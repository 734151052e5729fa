//! Generated datasets with a known informative feature subset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Dataset;

/// Two-class data in `[0, 1]^(informative + noise)`.
///
/// The first `informative` columns decide the label through the hyperplane
/// `sum(x) = informative / 2`; samples closer than `margin` to it are
/// rejected, so the classes are linearly separable with a gap. The remaining
/// columns are independent uniform noise.
pub fn informative_with_noise(
    n: usize,
    informative: usize,
    noise: usize,
    margin: f64,
    seed: u64,
) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = informative + noise;
    let centre = informative as f64 / 2.0;
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while rows.len() < n {
        let row: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
        let score: f64 = row[..informative].iter().sum::<f64>() - centre;
        if score.abs() < margin {
            continue;
        }
        // Alternate classes so the set stays balanced.
        let want = rows.len() % 2 == 1;
        if (score > 0.0) != want {
            continue;
        }
        labels.push(want as usize);
        rows.push(row);
    }
    Dataset::from_rows(&rows, labels).expect("generated rows are rectangular")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_balance_and_margin() {
        let ds = informative_with_noise(300, 5, 15, 0.3, 1);
        assert_eq!(ds.n_instances(), 300);
        assert_eq!(ds.n_features(), 20);
        assert_eq!(ds.class_counts(), vec![150, 150]);
        for i in 0..300 {
            let s: f64 = ds.row(i)[..5].iter().sum::<f64>() - 2.5;
            assert!(s.abs() >= 0.3);
            assert_eq!(s > 0.0, ds.label(i) == 1);
        }
        assert_eq!(ds, informative_with_noise(300, 5, 15, 0.3, 1));
    }
}

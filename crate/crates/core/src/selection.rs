//! Target-selection schemes for the exploration phase.
//!
//! Every scheme works on a slice of fitness values (lower is better) and
//! returns an index into it. Ties in fitness are broken by the lower index so
//! that the ordering used by the rank-based schemes is a strict total order.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const FITNESS_FLOOR: f64 = 1e-12;

/// Default tournament size.
pub const DEFAULT_TOURNAMENT_SIZE: usize = 3;
/// Default expected number of copies of the best individual under linear ranking.
pub const DEFAULT_ETA_PLUS: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SelectionScheme {
    UniformRandom,
    Tournament { size: usize },
    Proportional,
    LinearRank { eta_plus: f64 },
}

impl SelectionScheme {
    /// Checks scheme parameters against the group the scheme will draw from.
    pub fn validate(&self, group_size: usize) -> Result<()> {
        match *self {
            SelectionScheme::Tournament { size } => {
                if size < 2 {
                    return Err(invalid(format!("tournament size must be >= 2, got {size}")));
                }
                if size > group_size {
                    return Err(invalid(format!(
                        "tournament size {size} exceeds group size {group_size}"
                    )));
                }
            }
            SelectionScheme::LinearRank { eta_plus } => check_eta(eta_plus)?,
            SelectionScheme::UniformRandom | SelectionScheme::Proportional => {}
        }
        Ok(())
    }

    /// Draws one index.
    ///
    /// # Panics
    /// If `fitnesses` is empty.
    pub fn select<R: Rng + ?Sized>(&self, fitnesses: &[f64], rng: &mut R) -> usize {
        assert!(!fitnesses.is_empty(), "selection over an empty group");
        match *self {
            SelectionScheme::UniformRandom => rng.gen_range(0..fitnesses.len()),
            SelectionScheme::Tournament { size } => tournament_draw(fitnesses, size, rng),
            SelectionScheme::Proportional => proportional_draw(fitnesses, rng),
            SelectionScheme::LinearRank { eta_plus } => linear_rank_draw(fitnesses, eta_plus, rng),
        }
    }

    /// Exact selection probability of every index.
    pub fn probabilities(&self, fitnesses: &[f64]) -> Vec<f64> {
        match *self {
            SelectionScheme::UniformRandom => {
                vec![1.0 / fitnesses.len() as f64; fitnesses.len()]
            }
            SelectionScheme::Tournament { size } => tournament_probabilities(fitnesses, size),
            SelectionScheme::Proportional => proportional_probabilities(fitnesses),
            SelectionScheme::LinearRank { eta_plus } => {
                linear_rank_probabilities(fitnesses, eta_plus)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SelectionScheme::UniformRandom => "uniform",
            SelectionScheme::Tournament { .. } => "tournament",
            SelectionScheme::Proportional => "proportional",
            SelectionScheme::LinearRank { .. } => "linear-rank",
        }
    }
}

fn check_eta(eta_plus: f64) -> Result<()> {
    if (1.0..=2.0).contains(&eta_plus) {
        Ok(())
    } else {
        Err(invalid(format!(
            "eta_plus must lie in [1, 2], got {eta_plus}"
        )))
    }
}

fn better(fitnesses: &[f64], a: usize, b: usize) -> Ordering {
    fitnesses[a].total_cmp(&fitnesses[b]).then(a.cmp(&b))
}

/// Indices ordered best first; `order[0]` has rank 1.
pub fn rank_order(fitnesses: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| better(fitnesses, a, b));
    order
}

/// 1-based rank of every index.
fn ranks(fitnesses: &[f64]) -> Vec<usize> {
    let mut rank = vec![0; fitnesses.len()];
    for (r, i) in rank_order(fitnesses).into_iter().enumerate() {
        rank[i] = r + 1;
    }
    rank
}

pub fn select_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<usize> {
    if n == 0 {
        return Err(invalid("uniform selection over zero candidates"));
    }
    Ok(rng.gen_range(0..n))
}

/// Tournament of `size` candidates drawn uniformly with replacement; the best wins.
pub fn select_tournament<R: Rng + ?Sized>(
    fitnesses: &[f64],
    size: usize,
    rng: &mut R,
) -> Result<usize> {
    if fitnesses.is_empty() {
        return Err(invalid("tournament over an empty group"));
    }
    if size < 2 {
        return Err(invalid(format!("tournament size must be >= 2, got {size}")));
    }
    Ok(tournament_draw(fitnesses, size, rng))
}

fn tournament_draw<R: Rng + ?Sized>(fitnesses: &[f64], size: usize, rng: &mut R) -> usize {
    let n = fitnesses.len();
    let mut winner = rng.gen_range(0..n);
    for _ in 1..size {
        let challenger = rng.gen_range(0..n);
        if better(fitnesses, challenger, winner) == Ordering::Less {
            winner = challenger;
        }
    }
    winner
}

/// `P(rank i) = ((N - i + 1)^o - (N - i)^o) / N^o`, mapped back to indices.
pub fn tournament_probabilities(fitnesses: &[f64], size: usize) -> Vec<f64> {
    let n = fitnesses.len() as f64;
    let o = size as i32;
    ranks(fitnesses)
        .into_iter()
        .map(|r| {
            let r = r as f64;
            ((n - r + 1.0) / n).powi(o) - ((n - r) / n).powi(o)
        })
        .collect()
}

/// Roulette wheel over inverse fitness.
///
/// Fitness values at or below zero are floored at `1e-12` before inversion.
pub fn select_proportional<R: Rng + ?Sized>(fitnesses: &[f64], rng: &mut R) -> Result<usize> {
    if fitnesses.is_empty() {
        return Err(invalid("proportional selection over an empty group"));
    }
    Ok(proportional_draw(fitnesses, rng))
}

fn inverse_weights(fitnesses: &[f64]) -> Vec<f64> {
    fitnesses
        .iter()
        .map(|&f| 1.0 / f.max(FITNESS_FLOOR))
        .collect()
}

fn proportional_draw<R: Rng + ?Sized>(fitnesses: &[f64], rng: &mut R) -> usize {
    roulette(
        &inverse_weights(fitnesses),
        (0..fitnesses.len()).collect::<Vec<_>>().as_slice(),
        rng,
    )
}

pub fn proportional_probabilities(fitnesses: &[f64]) -> Vec<f64> {
    let w = inverse_weights(fitnesses);
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Spins a wheel whose slots are `weights` (need not be normalized) and
/// returns the matching entry of `slots`.
fn roulette<R: Rng + ?Sized>(weights: &[f64], slots: &[usize], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let r = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (&w, &slot) in weights.iter().zip(slots) {
        acc += w;
        if r < acc {
            return slot;
        }
    }
    // Rounding left r at the top edge; take the last slot with positive weight.
    weights
        .iter()
        .zip(slots)
        .rev()
        .find(|(w, _)| **w > 0.0)
        .map(|(_, &s)| s)
        .unwrap_or(slots[slots.len() - 1])
}

/// Probability of the individual holding 1-based `rank` among `n` under
/// linear ranking: `(eta+ - (eta+ - eta-)(rank - 1)/(n - 1)) / n`.
pub fn linear_rank_probability(rank: usize, n: usize, eta_plus: f64) -> f64 {
    if n == 1 {
        return 1.0;
    }
    let eta_minus = 2.0 - eta_plus;
    let slope = (rank - 1) as f64 / (n - 1) as f64;
    (eta_plus - (eta_plus - eta_minus) * slope) / n as f64
}

pub fn select_linear_rank<R: Rng + ?Sized>(
    fitnesses: &[f64],
    eta_plus: f64,
    rng: &mut R,
) -> Result<usize> {
    if fitnesses.is_empty() {
        return Err(invalid("linear-rank selection over an empty group"));
    }
    check_eta(eta_plus)?;
    Ok(linear_rank_draw(fitnesses, eta_plus, rng))
}

fn linear_rank_draw<R: Rng + ?Sized>(fitnesses: &[f64], eta_plus: f64, rng: &mut R) -> usize {
    let n = fitnesses.len();
    if n == 1 {
        return 0;
    }
    let order = rank_order(fitnesses);
    let weights: Vec<f64> = (1..=n)
        .map(|r| linear_rank_probability(r, n, eta_plus))
        .collect();
    roulette(&weights, &order, rng)
}

pub fn linear_rank_probabilities(fitnesses: &[f64], eta_plus: f64) -> Vec<f64> {
    let n = fitnesses.len();
    ranks(fitnesses)
        .into_iter()
        .map(|r| linear_rank_probability(r, n, eta_plus))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn frequencies(
        scheme: SelectionScheme,
        fitnesses: &[f64],
        trials: usize,
        seed: u64,
    ) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = vec![0usize; fitnesses.len()];
        for _ in 0..trials {
            counts[scheme.select(fitnesses, &mut rng)] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / trials as f64)
            .collect()
    }

    #[test]
    fn tournament_two_of_two_by_enumeration() {
        // Draw pairs (0,0) (0,1) (1,0) (1,1): index 0 (better) wins three of four.
        let p = tournament_probabilities(&[0.1, 0.9], 2);
        assert_eq!(p, vec![0.75, 0.25]);
    }

    #[test]
    fn tournament_full_size_best_frequency() {
        let f = [0.5, 0.1, 0.3, 0.7, 0.2];
        let n = f.len() as f64;
        let closed = (n.powi(5) - (n - 1.0).powi(5)) / n.powi(5);
        let freq = frequencies(SelectionScheme::Tournament { size: 5 }, &f, 100_000, 1);
        assert!((freq[1] - closed).abs() < 0.02);
        assert!((tournament_probabilities(&f, 5)[1] - closed).abs() < 1e-15);
    }

    #[test]
    fn tournament_equal_fitness_tie_goes_to_lower_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let i = select_tournament(&[0.2, 0.2, 0.2], 3, &mut rng).unwrap();
            assert!(i < 3);
        }
        assert!(select_tournament(&[], 3, &mut rng).is_err());
        assert!(select_tournament(&[0.1], 1, &mut rng).is_err());
    }

    #[test]
    fn proportional_examples() {
        assert_eq!(proportional_probabilities(&[0.2, 0.2]), vec![0.5, 0.5]);
        let p = proportional_probabilities(&[0.1, 0.3]);
        assert!((p[0] - 0.75).abs() < 1e-15 && (p[1] - 0.25).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            assert_eq!(select_proportional(&[0.4], &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn proportional_floors_non_positive_fitness() {
        let p = proportional_probabilities(&[0.0, -1.0, 1.0]);
        assert!(p.iter().all(|x| x.is_finite()));
        assert!((p[0] - p[1]).abs() < 1e-15);
        assert!(p[2] < 1e-11);
    }

    #[test]
    fn linear_rank_examples() {
        let p = linear_rank_probabilities(&[0.1, 0.2, 0.3], 1.5);
        let expect = [0.5, 1.0 / 3.0, 1.0 / 6.0];
        for (a, b) in p.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);

        let uniform = linear_rank_probabilities(&[0.4, 0.1, 0.3, 0.2], 1.0);
        assert!(uniform.iter().all(|&x| (x - 0.25).abs() < 1e-15));

        assert_eq!(linear_rank_probabilities(&[0.3, 0.1], 2.0), vec![0.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            assert_eq!(select_linear_rank(&[0.3, 0.1], 2.0, &mut rng).unwrap(), 1);
        }
        assert_eq!(select_linear_rank(&[0.3], 1.5, &mut rng).unwrap(), 0);
        assert!(select_linear_rank(&[0.3, 0.1], 2.5, &mut rng).is_err());
    }

    #[test]
    fn linear_rank_endpoints_match_expected_copies() {
        let n = 7;
        for eta in [1.0, 1.25, 1.5, 2.0] {
            assert!((n as f64 * linear_rank_probability(1, n, eta) - eta).abs() < 1e-12);
            assert!((n as f64 * linear_rank_probability(n, n, eta) - (2.0 - eta)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_frequencies_and_errors() {
        let freq = frequencies(SelectionScheme::UniformRandom, &[0.1; 4], 100_000, 4);
        assert!(freq.iter().all(|&x| (x - 0.25).abs() < 0.02));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(select_uniform(1, &mut rng).unwrap(), 0);
        assert!(select_uniform(0, &mut rng).is_err());

        let a: Vec<usize> = {
            let mut r = ChaCha8Rng::seed_from_u64(42);
            (0..20)
                .map(|_| select_uniform(10, &mut r).unwrap())
                .collect()
        };
        let b: Vec<usize> = {
            let mut r = ChaCha8Rng::seed_from_u64(42);
            (0..20)
                .map(|_| select_uniform(10, &mut r).unwrap())
                .collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        assert!(SelectionScheme::Tournament { size: 1 }
            .validate(10)
            .is_err());
        assert!(SelectionScheme::Tournament { size: 11 }
            .validate(10)
            .is_err());
        assert!(SelectionScheme::Tournament { size: 3 }.validate(3).is_ok());
        assert!(SelectionScheme::LinearRank { eta_plus: 0.5 }
            .validate(10)
            .is_err());
        assert!(SelectionScheme::Proportional.validate(1).is_ok());
    }

    fn schemes() -> impl Strategy<Value = SelectionScheme> {
        prop_oneof![
            Just(SelectionScheme::UniformRandom),
            (2usize..6).prop_map(|size| SelectionScheme::Tournament { size }),
            Just(SelectionScheme::Proportional),
            (1.0f64..=2.0).prop_map(|eta_plus| SelectionScheme::LinearRank { eta_plus }),
        ]
    }

    proptest! {
        #[test]
        fn selected_index_is_valid(
            scheme in schemes(),
            f in prop::collection::vec(0.001f64..1.0, 1..30),
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                prop_assert!(scheme.select(&f, &mut rng) < f.len());
            }
        }

        #[test]
        fn better_fitness_never_less_likely(
            scheme in schemes(),
            f in prop::collection::vec(0.001f64..1.0, 2..30),
        ) {
            let p = scheme.probabilities(&f);
            for i in 0..f.len() {
                for j in 0..f.len() {
                    if f[i] < f[j] {
                        prop_assert!(p[i] >= p[j] - 1e-15);
                    }
                }
            }
        }

        #[test]
        fn positive_scaling_leaves_probabilities_unchanged(
            scheme in schemes(),
            f in prop::collection::vec(0.001f64..1.0, 1..30),
            lambda in 0.01f64..100.0,
        ) {
            let scaled: Vec<f64> = f.iter().map(|x| x * lambda).collect();
            let a = scheme.probabilities(&f);
            let b = scheme.probabilities(&scaled);
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

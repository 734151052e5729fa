//! Continuous-to-binary mapping through the S-shaped (sigmoid) transfer
//! function.
//!
//! A snake's continuous position is its evolving state; the mask derived from
//! it is what the classifier sees. Every binarization is repaired so that at
//! least one feature stays selected.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Selected-feature bit vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureMask(Vec<bool>);

impl FeatureMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Mask with every feature selected.
    pub fn all(len: usize) -> Self {
        Self(vec![true; len])
    }

    /// Mask selecting exactly the given feature indices.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut bits = vec![false; len];
        for &i in indices {
            bits[i] = true;
        }
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of selected features.
    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Indices of selected features, ascending.
    pub fn indices(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Parses the `0`/`1` string written by [`Display`](fmt::Display).
    pub fn parse_bits(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// How a sigmoid probability is turned into a bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// `bit = 1` when `R < sigmoid(x)`: higher probability selects the feature.
    #[default]
    Standard,
    /// The inverted rule as printed: `bit = 0` when `R < sigmoid(x)`.
    PaperLiteral,
}

/// What to do when a binarization selects nothing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Repair {
    /// Switch on one uniformly chosen bit.
    #[default]
    FlipRandomBitOn,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferPolicy {
    pub threshold_mode: ThresholdMode,
    pub repair: Repair,
}

impl TransferPolicy {
    pub fn standard() -> Self {
        Self::default()
    }

    pub fn paper_literal() -> Self {
        Self {
            threshold_mode: ThresholdMode::PaperLiteral,
            repair: Repair::FlipRandomBitOn,
        }
    }
}

/// Logistic transfer `1 / (1 + e^-x)`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        // Same value, without overflowing exp for very negative x.
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Single-bit threshold rule for a given uniform draw `r`.
pub fn threshold_bit(probability: f64, r: f64, mode: ThresholdMode) -> bool {
    match mode {
        ThresholdMode::Standard => r < probability,
        ThresholdMode::PaperLiteral => r >= probability,
    }
}

/// Converts a continuous position into a repaired feature mask.
///
/// One uniform draw is consumed per dimension, plus one more when the repair
/// step fires.
pub fn binarize<R: Rng + ?Sized>(
    position: &[f64],
    policy: TransferPolicy,
    rng: &mut R,
) -> FeatureMask {
    let mut bits: Vec<bool> = position
        .iter()
        .map(|&x| threshold_bit(sigmoid(x), rng.gen::<f64>(), policy.threshold_mode))
        .collect();
    repair(&mut bits, policy.repair, rng);
    FeatureMask(bits)
}

fn repair<R: Rng + ?Sized>(bits: &mut [bool], how: Repair, rng: &mut R) {
    if bits.is_empty() || bits.iter().any(|&b| b) {
        return;
    }
    match how {
        Repair::FlipRandomBitOn => {
            let i = rng.gen_range(0..bits.len());
            bits[i] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sigmoid_values() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(1.0) - 0.731_058_578_630_004_9).abs() < 1e-12);
        assert!(sigmoid(800.0) <= 1.0 && sigmoid(800.0) > 0.999_999);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0) < 1e-6);
        assert!((sigmoid(-3.0) + sigmoid(3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_rules() {
        assert!(threshold_bit(0.5, 0.3, ThresholdMode::Standard));
        assert!(!threshold_bit(0.5, 0.3, ThresholdMode::PaperLiteral));
        assert!(!threshold_bit(0.5, 0.7, ThresholdMode::Standard));
        assert!(threshold_bit(0.5, 0.7, ThresholdMode::PaperLiteral));
    }

    #[test]
    fn all_zero_draw_is_repaired_to_one_bit() {
        // sigmoid(-50) is ~2e-22, so Standard mode never fires naturally.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mask = binarize(&[-50.0; 8], TransferPolicy::standard(), &mut rng);
            assert_eq!(mask.count(), 1);
            assert_eq!(mask.len(), 8);
        }
    }

    #[test]
    fn modes_are_complements_for_identical_draws() {
        let pos: Vec<f64> = (0..64).map(|i| (i as f64 - 32.0) / 8.0).collect();
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = a.clone();
        let std_bits: Vec<bool> = pos
            .iter()
            .map(|&x| threshold_bit(sigmoid(x), a.gen::<f64>(), ThresholdMode::Standard))
            .collect();
        let lit_bits: Vec<bool> = pos
            .iter()
            .map(|&x| threshold_bit(sigmoid(x), b.gen::<f64>(), ThresholdMode::PaperLiteral))
            .collect();
        for (s, l) in std_bits.iter().zip(&lit_bits) {
            assert_ne!(s, l);
        }
    }

    #[test]
    fn standard_mode_bit_mean_tracks_sigmoid() {
        let pos = [-1.0, 0.0, 0.4, 2.0];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 100_000;
        let mut ones = [0usize; 4];
        for _ in 0..trials {
            // Values chosen so an all-zero mask is rare; the repair bias stays far below 0.01.
            let m = binarize(&pos, TransferPolicy::standard(), &mut rng);
            for (d, o) in ones.iter_mut().enumerate() {
                *o += m.get(d) as usize;
            }
        }
        for (d, &x) in pos.iter().enumerate() {
            let mean = ones[d] as f64 / trials as f64;
            assert!(
                (mean - sigmoid(x)).abs() < 0.01,
                "dim {d}: {mean} vs {}",
                sigmoid(x)
            );
        }
    }

    #[test]
    fn mask_text_round_trip() {
        let m = FeatureMask::from_indices(6, &[0, 3, 5]);
        assert_eq!(m.to_string(), "100101");
        assert_eq!(FeatureMask::parse_bits("100101"), Some(m.clone()));
        assert_eq!(m.indices(), vec![0, 3, 5]);
        assert_eq!(FeatureMask::parse_bits("10x"), None);
    }
}

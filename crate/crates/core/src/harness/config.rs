//! Experiment configuration: defaults, the flat config file, and CLI overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::binary::{ThresholdMode, TransferPolicy};
use crate::error::{invalid, Error, Result};
use crate::evaluation::{CsvOptions, FitnessWeights, DEFAULT_K};
use crate::optimizer::{Exploitation, SoParams, Strategy};
use crate::population::male_count;
use crate::selection::{SelectionScheme, DEFAULT_ETA_PLUS, DEFAULT_TOURNAMENT_SIZE};

/// Optimizer variant.
///
/// | variant | exploration target | hot exploitation |
/// |---------|--------------------|------------------|
/// | BSO     | uniform random     | food approach    |
/// | LSO     | uniform random     | spiral           |
/// | TLSO    | tournament         | spiral           |
/// | PLSO    | proportional       | spiral           |
/// | LLSO    | linear rank        | spiral           |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "UPPERCASE")]
pub enum Variant {
    #[value(name = "BSO")]
    Bso,
    #[value(name = "LSO")]
    Lso,
    #[value(name = "TLSO")]
    Tlso,
    #[value(name = "PLSO")]
    Plso,
    #[value(name = "LLSO")]
    Llso,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Bso,
        Variant::Lso,
        Variant::Tlso,
        Variant::Plso,
        Variant::Llso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Bso => "BSO",
            Variant::Lso => "LSO",
            Variant::Tlso => "TLSO",
            Variant::Plso => "PLSO",
            Variant::Llso => "LLSO",
        }
    }

    pub fn strategy(self, selection: &SelectionParams) -> Strategy {
        let scheme = match self {
            Variant::Bso | Variant::Lso => SelectionScheme::UniformRandom,
            Variant::Tlso => SelectionScheme::Tournament {
                size: selection.tournament_size,
            },
            Variant::Plso => SelectionScheme::Proportional,
            Variant::Llso => SelectionScheme::LinearRank {
                eta_plus: selection.eta_plus,
            },
        };
        let exploitation = match self {
            Variant::Bso => Exploitation::FoodApproach,
            _ => Exploitation::Spiral,
        };
        Strategy {
            selection: scheme,
            exploitation,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                invalid(format!(
                    "unknown variant {s:?}; valid variants: {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub tournament_size: usize,
    pub eta_plus: f64,
}

impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            tournament_size: DEFAULT_TOURNAMENT_SIZE,
            eta_plus: DEFAULT_ETA_PLUS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset_path: Option<PathBuf>,
    pub header: bool,
    /// 0-based label column; `None` is the last column.
    pub label_col: Option<usize>,
    pub variant: Variant,
    pub population_size: usize,
    pub iterations: usize,
    pub runs: usize,
    pub seed: u64,
    pub so_params: SoParams,
    pub selection: SelectionParams,
    pub weights: FitnessWeights,
    pub k: usize,
    pub train_fraction: f64,
    pub transfer_policy: TransferPolicy,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset_path: None,
            header: false,
            label_col: None,
            variant: Variant::Tlso,
            population_size: 50,
            iterations: 100,
            runs: 30,
            seed: 0,
            so_params: SoParams::default(),
            selection: SelectionParams::default(),
            weights: FitnessWeights::default(),
            k: DEFAULT_K,
            train_fraction: 0.7,
            transfer_policy: TransferPolicy::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn strategy(&self) -> Strategy {
        self.variant.strategy(&self.selection)
    }

    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            header: self.header,
            label_column: self.label_col,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(invalid("runs must be >= 1"));
        }
        if self.population_size < 4 {
            return Err(invalid(format!(
                "population_size must be >= 4, got {}",
                self.population_size
            )));
        }
        if self.iterations < 1 {
            return Err(invalid("iterations must be >= 1"));
        }
        if self.k < 1 {
            return Err(invalid("k must be >= 1"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid(format!(
                "train_fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        self.so_params.validate()?;
        self.weights.validate()?;
        self.strategy()
            .selection
            .validate(male_count(self.population_size))?;
        Ok(())
    }

    /// Resolved configuration including the selection and exploitation
    /// operators implied by the variant.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v["strategy"] = serde_json::to_value(self.strategy()).expect("strategy serializes");
        v
    }

    pub fn apply(&mut self, o: &ConfigOverrides) {
        macro_rules! set {
            ($($src:ident => $($dst:ident).+),* $(,)?) => {
                $(if let Some(v) = o.$src.clone() { self.$($dst).+ = v; })*
            };
        }
        set! {
            header => header,
            variant => variant,
            population_size => population_size,
            iterations => iterations,
            runs => runs,
            seed => seed,
            k1 => so_params.k1,
            k2 => so_params.k2,
            k3 => so_params.k3,
            q_threshold => so_params.q_threshold,
            temp_threshold => so_params.temp_threshold,
            mode_threshold => so_params.mode_threshold,
            spiral_b => so_params.spiral_b,
            egg_hatch_prob => so_params.egg_hatch_prob,
            spiral_cos_literal => so_params.spiral_cos_literal,
            tournament_size => selection.tournament_size,
            eta_plus => selection.eta_plus,
            alpha => weights.alpha,
            beta => weights.beta,
            k => k,
            train_fraction => train_fraction,
            transfer => transfer_policy.threshold_mode,
        }
        if let Some(p) = &o.dataset {
            self.dataset_path = Some(p.clone());
        }
        if let Some(c) = o.label_col {
            self.label_col = Some(c);
        }
    }
}

/// Every configurable key. The same set is accepted as `key = value` lines in
/// a config file (snake_case keys) and as `--kebab-case` CLI flags; flags win.
#[derive(Clone, Debug, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    /// CSV dataset path.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// First CSV line is a header.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub header: Option<bool>,
    /// 0-based label column (default: last).
    #[arg(long)]
    pub label_col: Option<usize>,
    #[arg(long, ignore_case = true)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub population_size: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub k2: Option<f64>,
    #[arg(long)]
    pub k3: Option<f64>,
    #[arg(long)]
    pub q_threshold: Option<f64>,
    #[arg(long)]
    pub temp_threshold: Option<f64>,
    #[arg(long)]
    pub mode_threshold: Option<f64>,
    #[arg(long)]
    pub spiral_b: Option<f64>,
    #[arg(long)]
    pub egg_hatch_prob: Option<f64>,
    /// Use the constant cosine term in the spiral.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub spiral_cos_literal: Option<bool>,
    #[arg(long)]
    pub tournament_size: Option<usize>,
    #[arg(long)]
    pub eta_plus: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Neighbours for k-NN.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Bit threshold rule.
    #[arg(long, value_enum)]
    pub transfer: Option<ThresholdMode>,
}

impl ConfigOverrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text)
    }
}

/// Defaults, then the config file (if any), then CLI flags.
pub fn resolve(file: Option<&Path>, flags: &ConfigOverrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = file {
        cfg.apply(&ConfigOverrides::from_file(path)?);
    }
    cfg.apply(flags);
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.population_size, 50);
        assert_eq!(cfg.iterations, 100);
        assert_eq!(cfg.runs, 30);
        assert_eq!(cfg.k, 5);
    }

    #[test]
    fn variant_wiring() {
        let sel = SelectionParams::default();
        assert_eq!(
            Variant::Bso.strategy(&sel).exploitation,
            Exploitation::FoodApproach
        );
        assert_eq!(
            Variant::Lso.strategy(&sel).selection,
            SelectionScheme::UniformRandom
        );
        assert_eq!(
            Variant::Tlso.strategy(&sel).selection,
            SelectionScheme::Tournament { size: 3 }
        );
        assert_eq!(
            Variant::Plso.strategy(&sel).selection,
            SelectionScheme::Proportional
        );
        assert_eq!(
            Variant::Llso.strategy(&sel).selection,
            SelectionScheme::LinearRank { eta_plus: 1.5 }
        );
        assert!(Variant::ALL[1..]
            .iter()
            .all(|v| v.strategy(&sel).exploitation == Exploitation::Spiral));
    }

    #[test]
    fn variant_parse() {
        assert_eq!("tlso".parse::<Variant>().unwrap(), Variant::Tlso);
        let err = "XYZ".parse::<Variant>().unwrap_err().to_string();
        assert!(err.contains("BSO") && err.contains("LLSO"));
    }

    #[test]
    fn file_then_flags() {
        let file = ConfigOverrides::from_toml(
            "dataset = \"d.csv\"\nvariant = \"PLSO\"\nruns = 3\nk = 7\nalpha = 0.9\nbeta = 0.1\ntransfer = \"paper-literal\"\n",
        )
        .unwrap();
        let mut cfg = ExperimentConfig::default();
        cfg.apply(&file);
        cfg.apply(&ConfigOverrides {
            runs: Some(5),
            ..Default::default()
        });
        assert_eq!(cfg.variant, Variant::Plso);
        assert_eq!(cfg.runs, 5);
        assert_eq!(cfg.k, 7);
        assert_eq!(
            cfg.weights,
            FitnessWeights {
                alpha: 0.9,
                beta: 0.1
            }
        );
        assert_eq!(
            cfg.transfer_policy.threshold_mode,
            ThresholdMode::PaperLiteral
        );
        assert_eq!(cfg.dataset_path.as_deref(), Some(Path::new("d.csv")));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(ConfigOverrides::from_toml("populaton_size = 3\n").is_err());
    }

    #[test]
    fn validation_failures() {
        let bad = [
            ExperimentConfig {
                runs: 0,
                ..Default::default()
            },
            ExperimentConfig {
                population_size: 3,
                ..Default::default()
            },
            ExperimentConfig {
                iterations: 0,
                ..Default::default()
            },
            ExperimentConfig {
                train_fraction: 1.0,
                ..Default::default()
            },
            ExperimentConfig {
                population_size: 4,
                variant: Variant::Tlso,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn json_echo_has_resolved_defaults() {
        let v = ExperimentConfig::default().to_json();
        assert_eq!(v["k"], 5);
        assert_eq!(v["weights"]["alpha"], 0.99);
        assert_eq!(v["strategy"]["selection"]["kind"], "tournament");
        assert_eq!(v["so_params"]["k3"], 2.0);
    }
}

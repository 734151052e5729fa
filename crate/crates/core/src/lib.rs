//! Wrapper feature selection with the binary Snake Optimizer.
//!
//! Continuous snake positions in `[0, 1]^d` are mapped to feature masks with a
//! sigmoid transfer function and scored by a k-NN classifier on a held-out
//! split: `fitness = alpha · error + beta · selected / total`. Five variants
//! differ in how exploration targets are chosen (uniform, tournament,
//! proportional, linear rank) and in the hot-phase exploitation operator
//! (original food approach or logarithmic spiral).
//!
//! ```no_run
//! use snakefs::evaluation::synthetic::informative_with_noise;
//! use snakefs::harness::{run_experiment, ExperimentConfig, Parallelism, Variant};
//!
//! let data = informative_with_noise(300, 5, 15, 0.3, 1);
//! let cfg = ExperimentConfig { variant: Variant::Tlso, runs: 5, ..Default::default() };
//! let exp = run_experiment(&cfg, &data, Parallelism::from_env()).unwrap();
//! println!("{:?}", exp.stats.get(snakefs::harness::Metric::Accuracy));
//! ```

pub mod binary;
pub mod error;
pub mod evaluation;
pub mod harness;
pub mod optimizer;
pub mod population;
pub mod selection;

pub use error::{Error, Result};

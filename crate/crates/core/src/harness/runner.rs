//! Full optimizer runs and the multi-run protocol.

use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::binary::FeatureMask;
use crate::error::{invalid, Error, Result};
use crate::evaluation::{normalize_min_max, split, Dataset, EvalResult, KnnEvaluator};
use crate::optimizer::SnakeOptimizer;
use crate::population::{init_population, Bounds, Objective};

use super::config::ExperimentConfig;
use super::stats::SummaryStats;

/// Env var capping the number of runs executed concurrently.
pub const THREADS_ENV: &str = "SNAKEFS_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    /// Scores of the best mask found.
    pub best: EvalResult,
    /// Best-so-far fitness after each iteration; entry `i` is iteration `i + 1`.
    pub convergence: Vec<f64>,
    pub wall_time_secs: f64,
}

impl RunRecord {
    /// `(iteration, best fitness)` pairs, 1-based.
    pub fn convergence_points(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.convergence
            .iter()
            .enumerate()
            .map(|(i, &f)| (i + 1, f))
    }

    pub fn best_mask(&self) -> &FeatureMask {
        &self.best.mask
    }

    /// Equality ignoring the wall-clock time.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        self.run_index == other.run_index
            && self.seed == other.seed
            && self.best == other.best
            && self.convergence == other.convergence
    }
}

/// Memoizes fitness by mask. The objective is pure, so caching cannot change
/// any result.
struct Cached<'a> {
    inner: &'a KnnEvaluator,
    seen: HashMap<FeatureMask, f64>,
}

impl Objective for Cached<'_> {
    fn fitness(&mut self, mask: &FeatureMask) -> Result<f64> {
        if let Some(&f) = self.seen.get(mask) {
            return Ok(f);
        }
        let f = self.inner.evaluate(mask)?.fitness;
        self.seen.insert(mask.clone(), f);
        Ok(f)
    }
}

/// Seed for run `run_index` of an experiment seeded with `base`.
pub fn run_seed(base: u64, run_index: usize) -> u64 {
    base.wrapping_add(run_index as u64)
}

/// One independent run: split and normalize the data, initialize the
/// population and iterate the optimizer for the configured budget.
pub fn run_once(
    cfg: &ExperimentConfig,
    dataset: &Dataset,
    run_index: usize,
    seed: u64,
) -> Result<RunRecord> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = normalize_min_max(split(dataset, cfg.train_fraction, &mut rng)?);
    let evaluator = KnnEvaluator::new(data, cfg.weights, cfg.k)?;
    let mut objective = Cached {
        inner: &evaluator,
        seen: HashMap::new(),
    };

    let bounds = Bounds::unit();
    let optimizer = SnakeOptimizer {
        params: cfg.so_params,
        bounds,
        strategy: cfg.strategy(),
        policy: cfg.transfer_policy,
    };
    let mut pop = init_population(
        cfg.population_size,
        dataset.n_features(),
        bounds,
        cfg.transfer_policy,
        &mut objective,
        &mut rng,
    )?;

    let mut convergence = Vec::with_capacity(cfg.iterations);
    for c in 0..cfg.iterations {
        optimizer.step(&mut pop, c, cfg.iterations, &mut objective, &mut rng)?;
        convergence.push(pop.global_best.fitness);
    }
    let best = evaluator.evaluate(&pop.global_best.mask)?;
    Ok(RunRecord {
        run_index,
        seed,
        best,
        convergence,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// At most this many runs at once.
    Threads(usize),
}

impl Parallelism {
    /// From `SNAKEFS_THREADS`, defaulting to the available cores.
    pub fn from_env() -> Self {
        let n = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if n == 1 {
            Parallelism::Sequential
        } else {
            Parallelism::Threads(n)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub stats: SummaryStats,
}

/// Executes `cfg.runs` runs seeded `cfg.seed + i` and aggregates them.
/// Results are identical for every [`Parallelism`] setting.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    dataset: &Dataset,
    parallelism: Parallelism,
) -> Result<Experiment> {
    cfg.validate()?;
    let one = |i: usize| {
        let seed = run_seed(cfg.seed, i);
        run_once(cfg, dataset, i, seed).map_err(|e| Error::Run {
            seed,
            source: Box::new(e),
        })
    };
    let records = match parallelism {
        Parallelism::Sequential | Parallelism::Threads(1) => {
            (0..cfg.runs).map(one).collect::<Result<Vec<_>>>()?
        }
        Parallelism::Threads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..cfg.runs)
                    .into_par_iter()
                    .map(one)
                    .collect::<Result<Vec<_>>>()
            })?
        }
    };
    let stats = SummaryStats::from_records(&records);
    Ok(Experiment {
        config: cfg.clone(),
        records,
        stats,
    })
}

/// Loads the configured dataset.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let path = cfg
        .dataset_path
        .as_ref()
        .ok_or_else(|| Error::Config("no dataset path configured".into()))?;
    crate::evaluation::load_csv(path, &cfg.csv_options())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::synthetic::informative_with_noise;
    use crate::harness::config::Variant;

    fn small_cfg(variant: Variant) -> ExperimentConfig {
        ExperimentConfig {
            variant,
            population_size: 10,
            iterations: 12,
            runs: 3,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn single_iteration_has_single_point() {
        let ds = informative_with_noise(60, 2, 3, 0.2, 0);
        let cfg = ExperimentConfig {
            iterations: 1,
            ..small_cfg(Variant::Lso)
        };
        let r = run_once(&cfg, &ds, 0, 1).unwrap();
        assert_eq!(r.convergence.len(), 1);
        assert_eq!(r.convergence_points().next(), Some((1, r.best.fitness)));
    }

    #[test]
    fn run_is_deterministic_and_elitist() {
        let ds = informative_with_noise(60, 2, 3, 0.2, 0);
        for v in Variant::ALL {
            let cfg = small_cfg(v);
            let a = run_once(&cfg, &ds, 0, 11).unwrap();
            let b = run_once(&cfg, &ds, 0, 11).unwrap();
            assert!(a.same_outcome(&b), "{v}");
            assert!(a.convergence.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*a.convergence.last().unwrap(), a.best.fitness);
        }
    }

    #[test]
    fn seeds_and_parallelism() {
        let ds = informative_with_noise(60, 2, 3, 0.2, 0);
        let cfg = small_cfg(Variant::Tlso);
        let seq = run_experiment(&cfg, &ds, Parallelism::Sequential).unwrap();
        let par = run_experiment(&cfg, &ds, Parallelism::Threads(3)).unwrap();
        let seeds: Vec<u64> = seq.records.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![7, 8, 9]);
        for (a, b) in seq.records.iter().zip(&par.records) {
            assert!(a.same_outcome(b));
        }
    }

    #[test]
    fn failing_run_reports_seed() {
        let ds = informative_with_noise(60, 2, 3, 0.2, 0);
        let cfg = ExperimentConfig {
            k: 500,
            ..small_cfg(Variant::Bso)
        };
        match run_experiment(&cfg, &ds, Parallelism::Sequential) {
            Err(Error::Run { seed, .. }) => assert_eq!(seed, 7),
            other => panic!("unexpected {other:?}"),
        }
    }
}

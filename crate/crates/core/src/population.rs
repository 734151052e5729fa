//! Snake population: continuous positions, derived masks, and the elitist
//! archive of best-so-far individuals.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::binary::{binarize, FeatureMask, TransferPolicy};
use crate::error::{invalid, Result};

/// Anything that scores a feature mask. Lower is better.
pub trait Objective {
    fn fitness(&mut self, mask: &FeatureMask) -> Result<f64>;
}

impl<F> Objective for F
where
    F: FnMut(&FeatureMask) -> Result<f64>,
{
    fn fitness(&mut self, mask: &FeatureMask) -> Result<f64> {
        self(mask)
    }
}

/// Search-space bounds shared by every dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub s_min: f64,
    pub s_max: f64,
}

impl Bounds {
    pub fn new(s_min: f64, s_max: f64) -> Result<Self> {
        if !s_min.is_finite() || !s_max.is_finite() || s_min >= s_max {
            return Err(invalid(format!(
                "bounds require s_min < s_max, got [{s_min}, {s_max}]"
            )));
        }
        Ok(Self { s_min, s_max })
    }

    /// The unit interval used for feature selection.
    pub fn unit() -> Self {
        Self {
            s_min: 0.0,
            s_max: 1.0,
        }
    }

    pub fn width(&self) -> f64 {
        self.s_max - self.s_min
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.s_min, self.s_max)
    }

    /// `s_min + R (s_max - s_min)` with `R ~ U[0, 1)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.s_min + rng.gen::<f64>() * self.width()
    }

    pub fn sample_position<R: Rng + ?Sized>(&self, dim: usize, rng: &mut R) -> Vec<f64> {
        (0..dim).map(|_| self.sample(rng)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sex {
    Male,
    Female,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snake {
    pub position: Vec<f64>,
    pub mask: FeatureMask,
    pub fitness: f64,
    pub sex: Sex,
}

impl Snake {
    /// Re-derives the mask from the current position and scores it.
    pub fn refresh<O, R>(
        &mut self,
        policy: TransferPolicy,
        objective: &mut O,
        rng: &mut R,
    ) -> Result<()>
    where
        O: Objective + ?Sized,
        R: Rng + ?Sized,
    {
        self.mask = binarize(&self.position, policy, rng);
        self.fitness = objective.fitness(&self.mask)?;
        Ok(())
    }

    fn fresh<O, R>(
        sex: Sex,
        dim: usize,
        bounds: Bounds,
        policy: TransferPolicy,
        objective: &mut O,
        rng: &mut R,
    ) -> Result<Self>
    where
        O: Objective + ?Sized,
        R: Rng + ?Sized,
    {
        let mut snake = Snake {
            position: bounds.sample_position(dim, rng),
            mask: FeatureMask::all(dim),
            fitness: f64::INFINITY,
            sex,
        };
        snake.refresh(policy, objective, rng)?;
        Ok(snake)
    }
}

/// Male count for a population of `n`; females take the remainder.
pub fn male_count(n: usize) -> usize {
    n / 2
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnakePopulation {
    pub males: Vec<Snake>,
    pub females: Vec<Snake>,
    pub best_male: Snake,
    pub best_female: Snake,
    /// Food location: the better of the two group bests.
    pub global_best: Snake,
}

impl SnakePopulation {
    /// Builds a population from already-scored groups and seeds the archive.
    pub fn from_groups(males: Vec<Snake>, females: Vec<Snake>) -> Result<Self> {
        if males.is_empty() || females.is_empty() {
            return Err(invalid("both groups must be non-empty"));
        }
        let best_male = best_of(&males).clone();
        let best_female = best_of(&females).clone();
        let global_best = if best_female.fitness < best_male.fitness {
            best_female.clone()
        } else {
            best_male.clone()
        };
        Ok(Self {
            males,
            females,
            best_male,
            best_female,
            global_best,
        })
    }

    pub fn len(&self) -> usize {
        self.males.len() + self.females.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.global_best.position.len()
    }

    pub fn snakes(&self) -> impl Iterator<Item = &Snake> {
        self.males.iter().chain(self.females.iter())
    }

    pub fn snakes_mut(&mut self) -> impl Iterator<Item = &mut Snake> {
        self.males.iter_mut().chain(self.females.iter_mut())
    }

    /// Adopts any strictly better current individual into the archive.
    /// Ties keep the incumbent.
    pub fn update_bests(&mut self) {
        adopt_if_better(&mut self.best_male, &self.males);
        adopt_if_better(&mut self.best_female, &self.females);
        let contender = if self.best_female.fitness < self.best_male.fitness {
            &self.best_female
        } else {
            &self.best_male
        };
        if contender.fitness < self.global_best.fitness {
            self.global_best = contender.clone();
        }
    }
}

fn best_of(group: &[Snake]) -> &Snake {
    let mut best = &group[0];
    for s in &group[1..] {
        if s.fitness < best.fitness {
            best = s;
        }
    }
    best
}

fn adopt_if_better(incumbent: &mut Snake, group: &[Snake]) {
    let challenger = best_of(group);
    if challenger.fitness < incumbent.fitness {
        *incumbent = challenger.clone();
    }
}

/// Random initial population of `n` snakes over `dim` dimensions, scored and
/// split into `floor(n/2)` males and the remaining females.
pub fn init_population<O, R>(
    n: usize,
    dim: usize,
    bounds: Bounds,
    policy: TransferPolicy,
    objective: &mut O,
    rng: &mut R,
) -> Result<SnakePopulation>
where
    O: Objective + ?Sized,
    R: Rng + ?Sized,
{
    if n < 4 {
        return Err(invalid(format!("population size must be >= 4, got {n}")));
    }
    if dim == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    let n_m = male_count(n);
    let males = (0..n_m)
        .map(|_| Snake::fresh(Sex::Male, dim, bounds, policy, objective, rng))
        .collect::<Result<Vec<_>>>()?;
    let females = (n_m..n)
        .map(|_| Snake::fresh(Sex::Female, dim, bounds, policy, objective, rng))
        .collect::<Result<Vec<_>>>()?;
    SnakePopulation::from_groups(males, females)
}

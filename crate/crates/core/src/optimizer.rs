//! One iteration of Snake Optimizer dynamics.
//!
//! The temperature and food-quantity schedules pick exactly one branch per
//! iteration for the whole population:
//!
//! * `Q < q_threshold`: exploration toward a same-sex target chosen by the
//!   configured [`SelectionScheme`];
//! * otherwise, `T > temp_threshold`: exploitation around the food location,
//!   either by the logarithmic spiral or the original food-approach step;
//! * otherwise one uniform draw picks fight mode or mating mode, and mating is
//!   followed by a chance of replacing the worst male and female.
//!
//! Every `±` in the update rules is an independent fair coin per dimension.
//! Positions are clamped to the bounds after every update.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::binary::TransferPolicy;
use crate::error::{invalid, Result};
use crate::population::{Bounds, Objective, Snake, SnakePopulation};
use crate::selection::SelectionScheme;

const FITNESS_EPS: f64 = 1e-12;
const MIN_EXPONENT: f64 = -700.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SoParams {
    /// Food-quantity scale.
    pub k1: f64,
    /// Exploration step scale.
    pub k2: f64,
    /// Exploitation, fight and mating step scale.
    pub k3: f64,
    pub q_threshold: f64,
    pub temp_threshold: f64,
    pub mode_threshold: f64,
    /// Logarithmic spiral shape constant.
    pub spiral_b: f64,
    pub egg_hatch_prob: f64,
    /// Use the constant `cos(2π) = 1` in the spiral instead of `cos(2πt)`.
    pub spiral_cos_literal: bool,
}

impl Default for SoParams {
    fn default() -> Self {
        Self {
            k1: 0.5,
            k2: 0.05,
            k3: 2.0,
            q_threshold: 0.25,
            temp_threshold: 0.6,
            mode_threshold: 0.6,
            spiral_b: 1.0,
            egg_hatch_prob: 0.5,
            spiral_cos_literal: false,
        }
    }
}

impl SoParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("k1", self.k1), ("k2", self.k2), ("k3", self.k3)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [
            ("q_threshold", self.q_threshold),
            ("temp_threshold", self.temp_threshold),
            ("mode_threshold", self.mode_threshold),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.egg_hatch_prob) {
            return Err(invalid(format!(
                "egg_hatch_prob must lie in [0, 1], got {}",
                self.egg_hatch_prob
            )));
        }
        if !self.spiral_b.is_finite() {
            return Err(invalid("spiral_b must be finite"));
        }
        Ok(())
    }
}

/// How the population exploits the food location when the weather is hot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exploitation {
    /// `L_food ± k3·T·R·(L_food − S)`, the original operator.
    FoodApproach,
    /// `D·e^{bt}·cos(2πt) + L_food`.
    Spiral,
}

/// Branch executed by one [`SnakeOptimizer::step`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Explore,
    Exploit,
    Fight,
    Mate { hatched: bool },
}

/// `T = exp(-c / C)`.
pub fn temperature(c: usize, max_iter: usize) -> Result<f64> {
    if max_iter == 0 {
        return Err(invalid("iteration budget must be positive"));
    }
    Ok((-(c as f64) / max_iter as f64).exp())
}

/// `Q = k1 · exp((c − C) / C)`.
pub fn food_quantity(c: usize, max_iter: usize, k1: f64) -> Result<f64> {
    if max_iter == 0 {
        return Err(invalid("iteration budget must be positive"));
    }
    let budget = max_iter as f64;
    Ok(k1 * ((c as f64 - budget) / budget).exp())
}

/// Lower end of the spiral parameter range: −1 at the first iteration,
/// falling linearly to −2 at the last.
pub fn spiral_low(c: usize, max_iter: usize) -> f64 {
    if max_iter <= 1 {
        return -1.0;
    }
    -1.0 - c as f64 / (max_iter - 1) as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationState {
    pub iteration: usize,
    pub max_iterations: usize,
    pub temperature: f64,
    pub quantity: f64,
    pub spiral_low: f64,
}

impl IterationState {
    pub fn at(iteration: usize, max_iterations: usize, params: &SoParams) -> Result<Self> {
        if iteration >= max_iterations {
            return Err(invalid(format!(
                "iteration {iteration} outside budget {max_iterations}"
            )));
        }
        Ok(Self {
            iteration,
            max_iterations,
            temperature: temperature(iteration, max_iterations)?,
            quantity: food_quantity(iteration, max_iterations, params.k1)?,
            spiral_low: spiral_low(iteration, max_iterations),
        })
    }
}

/// `exp(−other / own)` with a guarded denominator, clamped into `(0, 1]`.
pub fn ability(other_fitness: f64, own_fitness: f64) -> f64 {
    let ratio = other_fitness / own_fitness.max(FITNESS_EPS);
    (-ratio).clamp(MIN_EXPONENT, 0.0).exp()
}

fn signed(x: f64, positive: bool) -> f64 {
    if positive {
        x
    } else {
        -x
    }
}

/// Exploration rule for one dimension, before clamping.
pub fn explore_component(
    target: f64,
    ability: f64,
    k2: f64,
    r: f64,
    positive: bool,
    bounds: Bounds,
) -> f64 {
    target + signed(k2 * ability * (bounds.width() * r + bounds.s_min), positive)
}

/// Spiral rule for one dimension, before clamping.
pub fn spiral_component(current: f64, food: f64, b: f64, t: f64, cos_literal: bool) -> f64 {
    let distance = (current - food).abs();
    let wave = if cos_literal {
        (2.0 * PI).cos()
    } else {
        (2.0 * PI * t).cos()
    };
    distance * (b * t).exp() * wave + food
}

/// Food-approach rule for one dimension, before clamping.
pub fn food_component(
    current: f64,
    food: f64,
    k3: f64,
    temperature: f64,
    r: f64,
    positive: bool,
) -> f64 {
    food + signed(k3 * temperature * r * (food - current), positive)
}

/// Shared form of the fight and mating rules: `old ± k3·A·R·(toward − old)`.
pub fn pull_component(
    current: f64,
    toward: f64,
    k3: f64,
    ability: f64,
    r: f64,
    positive: bool,
) -> f64 {
    current + signed(k3 * ability * r * (toward - current), positive)
}

/// New position for a snake exploring around `target`.
pub fn explore_update<R: Rng + ?Sized>(
    target: &[f64],
    own_fitness: f64,
    target_fitness: f64,
    bounds: Bounds,
    k2: f64,
    rng: &mut R,
) -> Vec<f64> {
    let a = ability(target_fitness, own_fitness);
    target
        .iter()
        .map(|&t| {
            let r = rng.gen::<f64>();
            let positive = rng.gen::<bool>();
            bounds.clamp(explore_component(t, a, k2, r, positive, bounds))
        })
        .collect()
}

/// New position for a snake spiralling around `food`; `t ~ U[low, 1]` per dimension.
pub fn spiral_update<R: Rng + ?Sized>(
    current: &[f64],
    food: &[f64],
    b: f64,
    low: f64,
    cos_literal: bool,
    bounds: Bounds,
    rng: &mut R,
) -> Vec<f64> {
    current
        .iter()
        .zip(food)
        .map(|(&x, &f)| {
            let t = low + (1.0 - low) * rng.gen::<f64>();
            bounds.clamp(spiral_component(x, f, b, t, cos_literal))
        })
        .collect()
}

pub fn food_update<R: Rng + ?Sized>(
    current: &[f64],
    food: &[f64],
    k3: f64,
    temperature: f64,
    bounds: Bounds,
    rng: &mut R,
) -> Vec<f64> {
    current
        .iter()
        .zip(food)
        .map(|(&x, &f)| {
            let r = rng.gen::<f64>();
            let positive = rng.gen::<bool>();
            bounds.clamp(food_component(x, f, k3, temperature, r, positive))
        })
        .collect()
}

/// Fight mode: move relative to the opposite group's best.
pub fn fight_update<R: Rng + ?Sized>(
    current: &[f64],
    own_fitness: f64,
    opposite_best: &[f64],
    opposite_best_fitness: f64,
    k3: f64,
    bounds: Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let a = ability(opposite_best_fitness, own_fitness);
    pull_all(current, opposite_best, 1.0, k3, a, bounds, rng)
}

/// Mating mode: move relative to the quantity-scaled partner position.
#[allow(clippy::too_many_arguments)]
pub fn mate_update<R: Rng + ?Sized>(
    current: &[f64],
    own_fitness: f64,
    partner: &[f64],
    partner_fitness: f64,
    quantity: f64,
    k3: f64,
    bounds: Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let a = ability(partner_fitness, own_fitness);
    pull_all(current, partner, quantity, k3, a, bounds, rng)
}

fn pull_all<R: Rng + ?Sized>(
    current: &[f64],
    toward: &[f64],
    scale: f64,
    k3: f64,
    a: f64,
    bounds: Bounds,
    rng: &mut R,
) -> Vec<f64> {
    current
        .iter()
        .zip(toward)
        .map(|(&x, &y)| {
            let r = rng.gen::<f64>();
            let positive = rng.gen::<bool>();
            bounds.clamp(pull_component(x, scale * y, k3, a, r, positive))
        })
        .collect()
}

fn worst_index(group: &[Snake]) -> usize {
    let mut worst = 0;
    for (i, s) in group.iter().enumerate().skip(1) {
        if s.fitness > group[worst].fitness {
            worst = i;
        }
    }
    worst
}

/// With probability `egg_hatch_prob`, re-samples the worst male and the worst
/// female uniformly inside `bounds`. The replaced snakes are marked unscored
/// (infinite fitness) until the caller re-evaluates them. Returns whether the
/// egg hatched.
pub fn replace_worst<R: Rng + ?Sized>(
    pop: &mut SnakePopulation,
    bounds: Bounds,
    egg_hatch_prob: f64,
    rng: &mut R,
) -> bool {
    if rng.gen::<f64>() >= egg_hatch_prob {
        return false;
    }
    let dim = pop.dim();
    for group in [&mut pop.males, &mut pop.females] {
        let w = worst_index(group);
        group[w].position = bounds.sample_position(dim, rng);
        group[w].fitness = f64::INFINITY;
    }
    true
}

/// Selection and exploitation operators that distinguish the variants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub selection: SelectionScheme,
    pub exploitation: Exploitation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnakeOptimizer {
    pub params: SoParams,
    pub bounds: Bounds,
    pub strategy: Strategy,
    pub policy: TransferPolicy,
}

impl SnakeOptimizer {
    /// Runs iteration `c` of `max_iter`: updates continuous positions by the
    /// branch the schedules select, re-binarizes and re-scores every snake,
    /// then refreshes the elitist archive.
    pub fn step<O, R>(
        &self,
        pop: &mut SnakePopulation,
        c: usize,
        max_iter: usize,
        objective: &mut O,
        rng: &mut R,
    ) -> Result<Branch>
    where
        O: Objective + ?Sized,
        R: Rng + ?Sized,
    {
        let p = &self.params;
        let state = IterationState::at(c, max_iter, p)?;

        let branch = if state.quantity < p.q_threshold {
            self.explore(pop, rng);
            Branch::Explore
        } else if state.temperature > p.temp_threshold {
            self.exploit(pop, &state, rng);
            Branch::Exploit
        } else if rng.gen::<f64>() > p.mode_threshold {
            self.fight(pop, rng);
            Branch::Fight
        } else {
            self.mate(pop, state.quantity, rng);
            let hatched = replace_worst(pop, self.bounds, p.egg_hatch_prob, rng);
            Branch::Mate { hatched }
        };

        for snake in pop.snakes_mut() {
            snake.refresh(self.policy, objective, rng)?;
        }
        pop.update_bests();
        Ok(branch)
    }

    fn explore<R: Rng + ?Sized>(&self, pop: &mut SnakePopulation, rng: &mut R) {
        for group in [&mut pop.males, &mut pop.females] {
            let fitnesses: Vec<f64> = group.iter().map(|s| s.fitness).collect();
            let positions: Vec<Vec<f64>> = group.iter().map(|s| s.position.clone()).collect();
            for (i, snake) in group.iter_mut().enumerate() {
                let t = self.strategy.selection.select(&fitnesses, rng);
                snake.position = explore_update(
                    &positions[t],
                    fitnesses[i],
                    fitnesses[t],
                    self.bounds,
                    self.params.k2,
                    rng,
                );
            }
        }
    }

    fn exploit<R: Rng + ?Sized>(
        &self,
        pop: &mut SnakePopulation,
        state: &IterationState,
        rng: &mut R,
    ) {
        let food = pop.global_best.position.clone();
        let p = &self.params;
        for snake in pop.males.iter_mut().chain(pop.females.iter_mut()) {
            snake.position = match self.strategy.exploitation {
                Exploitation::Spiral => spiral_update(
                    &snake.position,
                    &food,
                    p.spiral_b,
                    state.spiral_low,
                    p.spiral_cos_literal,
                    self.bounds,
                    rng,
                ),
                Exploitation::FoodApproach => food_update(
                    &snake.position,
                    &food,
                    p.k3,
                    state.temperature,
                    self.bounds,
                    rng,
                ),
            };
        }
    }

    fn fight<R: Rng + ?Sized>(&self, pop: &mut SnakePopulation, rng: &mut R) {
        let k3 = self.params.k3;
        let (best_m, best_f) = (&pop.best_male, &pop.best_female);
        for snake in pop.males.iter_mut() {
            snake.position = fight_update(
                &snake.position,
                snake.fitness,
                &best_f.position,
                best_f.fitness,
                k3,
                self.bounds,
                rng,
            );
        }
        for snake in pop.females.iter_mut() {
            snake.position = fight_update(
                &snake.position,
                snake.fitness,
                &best_m.position,
                best_m.fitness,
                k3,
                self.bounds,
                rng,
            );
        }
    }

    fn mate<R: Rng + ?Sized>(&self, pop: &mut SnakePopulation, quantity: f64, rng: &mut R) {
        let k3 = self.params.k3;
        let males: Vec<(Vec<f64>, f64)> = pop
            .males
            .iter()
            .map(|s| (s.position.clone(), s.fitness))
            .collect();
        let females: Vec<(Vec<f64>, f64)> = pop
            .females
            .iter()
            .map(|s| (s.position.clone(), s.fitness))
            .collect();
        for (i, snake) in pop.males.iter_mut().enumerate() {
            let (partner, pf) = &females[i % females.len()];
            snake.position = mate_update(
                &snake.position,
                snake.fitness,
                partner,
                *pf,
                quantity,
                k3,
                self.bounds,
                rng,
            );
        }
        for (i, snake) in pop.females.iter_mut().enumerate() {
            let (partner, pf) = &males[i % males.len()];
            snake.position = mate_update(
                &snake.position,
                snake.fitness,
                partner,
                *pf,
                quantity,
                k3,
                self.bounds,
                rng,
            );
        }
    }
}

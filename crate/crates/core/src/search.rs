//! Metered myopic local search.
//!
//! Both walkers charge one meter unit per alternative configuration they
//! evaluate. The starting configuration is evaluated for free and the current
//! fitness is carried forward, never recomputed. Moves require strictly
//! higher fitness.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NkError, Result};
use crate::landscape::{Configuration, Landscape};

/// Cap on overall-fitness evaluations of alternative configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Meter {
    budget: u64,
    consumed: u64,
}

impl Meter {
    pub fn new(budget: u64) -> Result<Self> {
        if budget == 0 {
            return Err(NkError::ZeroBudget);
        }
        Ok(Self {
            budget,
            consumed: 0,
        })
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn remaining(&self) -> u64 {
        self.budget - self.consumed
    }

    pub fn is_exhausted(&self) -> bool {
        self.consumed >= self.budget
    }

    /// Charges one evaluation. Returns `false`, charging nothing, if the
    /// budget is already spent.
    pub fn try_charge(&mut self) -> bool {
        if self.is_exhausted() {
            return false;
        }
        self.consumed += 1;
        true
    }

    fn charge_rest(&mut self) {
        self.consumed = self.budget;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    BudgetExhausted,
    Equilibrium,
    TimeStepsComplete,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::BudgetExhausted => "budget_exhausted",
            Termination::Equilibrium => "equilibrium",
            Termination::TimeStepsComplete => "time_steps_complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Smmls,
    Immls,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Smmls => "smmls",
            Algorithm::Immls => "immls",
        })
    }
}

impl FromStr for Algorithm {
    type Err = NkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smmls" => Ok(Algorithm::Smmls),
            "immls" => Ok(Algorithm::Immls),
            other => Err(NkError::domain(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Order in which IMMLS tries single-bit flips within a time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOrder {
    /// Nodes `0..n` every time step.
    #[default]
    Fixed,
    /// A fresh uniform permutation every time step.
    Permuted,
}

impl fmt::Display for SweepOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepOrder::Fixed => "fixed",
            SweepOrder::Permuted => "permuted",
        })
    }
}

impl FromStr for SweepOrder {
    type Err = NkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(SweepOrder::Fixed),
            "permuted" => Ok(SweepOrder::Permuted),
            other => Err(NkError::domain(format!("unknown sweep order {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkResult {
    pub initial_config: Configuration,
    pub final_config: Configuration,
    pub initial_fitness: f64,
    pub final_fitness: f64,
    pub evaluations_used: u64,
    pub successful_moves: u64,
    pub time_steps_executed: u64,
    pub termination: Termination,
}

impl WalkResult {
    /// `(final - initial) / initial`.
    pub fn fitness_improvement(&self) -> f64 {
        fitness_improvement(self)
    }

    pub fn resource_consumption_pct(&self, budget: u64) -> f64 {
        resource_consumption_pct(self, budget)
    }
}

pub fn fitness_improvement(result: &WalkResult) -> f64 {
    (result.final_fitness - result.initial_fitness) / result.initial_fitness
}

pub fn resource_consumption_pct(result: &WalkResult, budget: u64) -> f64 {
    100.0 * result.evaluations_used as f64 / budget as f64
}

/// One charged evaluation of an alternative configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub time_step: u64,
    pub node: usize,
    pub candidate_fitness: f64,
    pub accepted: bool,
    /// Meter reading after this evaluation was charged.
    pub consumed: u64,
}

/// Receives every charged evaluation of a walk.
pub trait WalkObserver {
    /// Observers that do not need the full event stream let SMMLS skip the
    /// provably fruitless tail of a walk once every flip has been rejected.
    const WANTS_EVERY_EVALUATION: bool = true;

    fn on_evaluation(&mut self, evaluation: &Evaluation);
}

/// Discards all events.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoTrace;

impl WalkObserver for NoTrace {
    const WANTS_EVERY_EVALUATION: bool = false;

    fn on_evaluation(&mut self, _: &Evaluation) {}
}

impl WalkObserver for Vec<Evaluation> {
    fn on_evaluation(&mut self, evaluation: &Evaluation) {
        self.push(*evaluation);
    }
}

/// Classical walk: each of `budget` time steps flips one uniformly chosen bit
/// and keeps the flip iff fitness strictly rises.
pub fn run_smmls<R: Rng + ?Sized>(
    landscape: &Landscape,
    start: &Configuration,
    meter: Meter,
    rng: &mut R,
) -> Result<WalkResult> {
    run_smmls_observed(landscape, start, meter, rng, &mut NoTrace)
}

pub fn run_smmls_observed<R: Rng + ?Sized, O: WalkObserver>(
    landscape: &Landscape,
    start: &Configuration,
    mut meter: Meter,
    rng: &mut R,
    observer: &mut O,
) -> Result<WalkResult> {
    landscape.check_config(start)?;
    let n = landscape.n();
    let mut current = start.clone();
    let initial_fitness = landscape.fitness_of_bits(current.bits());
    let mut fitness = initial_fitness;
    let mut moves = 0u64;

    // Fitness of neighbours already rejected since the last move. Re-drawing
    // one of them is still a charged evaluation; its outcome is just known.
    let mut rejected: Vec<Option<f64>> = vec![None; n];
    let mut rejected_count = 0usize;

    for step in 1..=meter.budget() {
        let node = rng.gen_range(0..n);
        meter.try_charge();
        let candidate = match rejected[node] {
            Some(known) => known,
            None => {
                let bits = current.bits_mut();
                bits[node] ^= 1;
                let f = landscape.fitness_of_bits(bits);
                bits[node] ^= 1;
                f
            }
        };
        let accepted = candidate > fitness;
        if accepted {
            current.flip(node);
            fitness = candidate;
            moves += 1;
            rejected.fill(None);
            rejected_count = 0;
        } else if rejected[node].is_none() {
            rejected[node] = Some(candidate);
            rejected_count += 1;
        }
        observer.on_evaluation(&Evaluation {
            time_step: step,
            node,
            candidate_fitness: candidate,
            accepted,
            consumed: meter.consumed(),
        });
        if !O::WANTS_EVERY_EVALUATION && rejected_count == n {
            // Strict local optimum: every remaining step is a rejection.
            meter.charge_rest();
            break;
        }
    }

    Ok(WalkResult {
        initial_config: start.clone(),
        final_config: current,
        initial_fitness,
        final_fitness: fitness,
        evaluations_used: meter.consumed(),
        successful_moves: moves,
        time_steps_executed: meter.budget(),
        termination: Termination::TimeStepsComplete,
    })
}

/// Sequential-sweep walk: each time step tries flips in sweep order and moves
/// on the first strict improvement. A full failed sweep ends the walk at
/// equilibrium; running out of budget mid-sweep ends it immediately.
///
/// `rng` is only drawn from in [`SweepOrder::Permuted`] mode.
pub fn run_immls<R: Rng + ?Sized>(
    landscape: &Landscape,
    start: &Configuration,
    meter: Meter,
    order: SweepOrder,
    rng: &mut R,
) -> Result<WalkResult> {
    run_immls_observed(landscape, start, meter, order, rng, &mut NoTrace)
}

pub fn run_immls_observed<R: Rng + ?Sized, O: WalkObserver>(
    landscape: &Landscape,
    start: &Configuration,
    mut meter: Meter,
    order: SweepOrder,
    rng: &mut R,
    observer: &mut O,
) -> Result<WalkResult> {
    landscape.check_config(start)?;
    let n = landscape.n();
    let mut current = start.clone();
    let initial_fitness = landscape.fitness_of_bits(current.bits());
    let mut fitness = initial_fitness;
    let mut moves = 0u64;
    let mut steps = 0u64;
    let mut sweep: Vec<usize> = (0..n).collect();

    let termination = 'walk: loop {
        if meter.is_exhausted() {
            break Termination::BudgetExhausted;
        }
        if order == SweepOrder::Permuted {
            sweep.shuffle(rng);
        }
        steps += 1;
        let mut moved = false;
        for &node in &sweep {
            if !meter.try_charge() {
                break 'walk Termination::BudgetExhausted;
            }
            let bits = current.bits_mut();
            bits[node] ^= 1;
            let candidate = landscape.fitness_of_bits(bits);
            let accepted = candidate > fitness;
            if accepted {
                fitness = candidate;
                moves += 1;
            } else {
                bits[node] ^= 1;
            }
            observer.on_evaluation(&Evaluation {
                time_step: steps,
                node,
                candidate_fitness: candidate,
                accepted,
                consumed: meter.consumed(),
            });
            if accepted {
                moved = true;
                break;
            }
        }
        if !moved {
            break Termination::Equilibrium;
        }
    };

    Ok(WalkResult {
        initial_config: start.clone(),
        final_config: current,
        initial_fitness,
        final_fitness: fitness,
        evaluations_used: meter.consumed(),
        successful_moves: moves,
        time_steps_executed: steps,
        termination,
    })
}

/// Runs either walker with a fresh meter of `budget`.
pub fn run_walk<R: Rng + ?Sized, O: WalkObserver>(
    algorithm: Algorithm,
    landscape: &Landscape,
    start: &Configuration,
    budget: u64,
    order: SweepOrder,
    rng: &mut R,
    observer: &mut O,
) -> Result<WalkResult> {
    let meter = Meter::new(budget)?;
    match algorithm {
        Algorithm::Smmls => run_smmls_observed(landscape, start, meter, rng, observer),
        Algorithm::Immls => run_immls_observed(landscape, start, meter, order, rng, observer),
    }
}

//! Means with standard errors, accumulated in a fixed order.

use serde::{Deserialize, Serialize};

use crate::search::{Termination, WalkResult};

/// A sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(count)`; 0 for fewer than two samples.
    pub std_error: f64,
}

impl Summary {
    /// True when `|mean| <= sigmas * std_error`.
    pub fn is_zero_within(&self, sigmas: f64) -> bool {
        self.mean.abs() <= sigmas * self.std_error
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn summary(&self) -> Summary {
        let std_error = if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
        };
        Summary {
            mean: self.mean,
            std_error,
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut stats = RunningStats::default();
        iter.into_iter().for_each(|v| stats.push(v));
        stats
    }
}

/// The per-walk numbers that aggregates are built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkMetrics {
    pub initial_fitness: f64,
    pub final_fitness: f64,
    pub fitness_improvement: f64,
    pub successful_moves: u64,
    pub evaluations_used: u64,
    pub resource_consumption_pct: f64,
    pub equilibrium: bool,
}

impl WalkMetrics {
    pub fn from_result(result: &WalkResult, budget: u64) -> Self {
        Self {
            initial_fitness: result.initial_fitness,
            final_fitness: result.final_fitness,
            fitness_improvement: result.fitness_improvement(),
            successful_moves: result.successful_moves,
            evaluations_used: result.evaluations_used,
            resource_consumption_pct: result.resource_consumption_pct(budget),
            equilibrium: result.termination == Termination::Equilibrium,
        }
    }
}

/// Averages of walk outcomes over a batch of replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub iterations: u64,
    pub final_fitness: Summary,
    pub initial_fitness: Summary,
    pub fitness_improvement: Summary,
    pub successful_moves: Summary,
    pub evaluations_used: Summary,
    pub resource_consumption_pct: Summary,
    pub equilibrium_fraction: f64,
}

impl AggregateStats {
    /// Reduces in iteration order, so equal inputs give bit-identical output.
    pub fn from_walks<'a>(walks: impl IntoIterator<Item = &'a WalkMetrics>) -> Self {
        let mut final_fitness = RunningStats::default();
        let mut initial_fitness = RunningStats::default();
        let mut improvement = RunningStats::default();
        let mut moves = RunningStats::default();
        let mut evaluations = RunningStats::default();
        let mut consumption = RunningStats::default();
        let mut equilibria = 0u64;
        for w in walks {
            final_fitness.push(w.final_fitness);
            initial_fitness.push(w.initial_fitness);
            improvement.push(w.fitness_improvement);
            moves.push(w.successful_moves as f64);
            evaluations.push(w.evaluations_used as f64);
            consumption.push(w.resource_consumption_pct);
            equilibria += u64::from(w.equilibrium);
        }
        let iterations = final_fitness.count();
        Self {
            iterations,
            final_fitness: final_fitness.summary(),
            initial_fitness: initial_fitness.summary(),
            fitness_improvement: improvement.summary(),
            successful_moves: moves.summary(),
            evaluations_used: evaluations.summary(),
            resource_consumption_pct: consumption.summary(),
            equilibrium_fraction: if iterations == 0 {
                0.0
            } else {
                equilibria as f64 / iterations as f64
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [0.3, 0.9, 0.1, 0.55, 0.72, 0.05];
        let s: RunningStats = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        let summary = s.summary();
        assert!((summary.mean - mean).abs() < 1e-15);
        assert!((summary.std_error - (var / 6.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_sample_has_zero_error() {
        let s: RunningStats = [0.42].into_iter().collect();
        assert_eq!(s.summary(), Summary { mean: 0.42, std_error: 0.0 });
    }
}

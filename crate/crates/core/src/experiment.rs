//! Monte-Carlo harness: replications, paired comparisons and the standard
//! sweeps.
//!
//! Replication `r` of any experiment sees
//!
//! * landscape seed `derive(master_seed, Landscape, r)`,
//! * start configuration from stream `derive(master_seed, Start, r)`,
//! * SMMLS bit choices from stream `derive(master_seed, Smmls, r)`,
//! * IMMLS permutations from stream `derive(master_seed, Immls, r)`.
//!
//! None of these depend on the budget, so a grid evaluates every `T` of one
//! `(n, k)` series on the same landscapes and starts. Replications run on the
//! current rayon pool and are reduced in index order, which makes every
//! aggregate independent of the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NkError, Result};
use crate::landscape::{
    Configuration, DependencyScheme, GenerateOptions, Landscape, TableStorage,
};
use crate::report::{
    Axis, ComparisonRow, ComparisonTable, DockingMetadata, DockingTable, TableMetadata,
    DOCKING_TOLERANCE,
};
use crate::rng::{self, StreamTag};
use crate::search::{run_immls, run_smmls, Meter, SweepOrder};
use crate::stats::{AggregateStats, RunningStats, Summary, WalkMetrics};

/// Node count of the docking table.
pub const DOCKING_N: usize = 16;
pub const DOCKING_K: [usize; 5] = [0, 2, 4, 8, 15];
/// Walk length used for docking; long enough that SMMLS stagnates.
pub const DOCKING_BUDGET: u64 = 1 << 16;

pub const REFERENCE_KAUFFMAN: [f64; 5] = [0.65, 0.70, 0.71, 0.68, 0.65];
pub const REFERENCE_SENDERO: [f64; 5] = [0.67, 0.71, 0.70, 0.68, 0.64];
pub const REFERENCE_SMMLS: [f64; 5] = [0.66, 0.71, 0.71, 0.69, 0.64];

/// Budgets of the default fitness/consumption sweep.
pub const DEFAULT_T_VALUES: [u64; 4] = [10, 50, 100, 200];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmSelection {
    Smmls,
    Immls,
    Both,
}

impl AlgorithmSelection {
    fn smmls(self) -> bool {
        matches!(self, AlgorithmSelection::Smmls | AlgorithmSelection::Both)
    }

    fn immls(self) -> bool {
        matches!(self, AlgorithmSelection::Immls | AlgorithmSelection::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub scheme: DependencyScheme,
    pub algorithm: AlgorithmSelection,
    #[serde(rename = "budget_T")]
    pub budget_t: u64,
    pub iterations: u64,
    #[serde(with = "crate::seed_serde")]
    pub master_seed: u64,
    #[serde(default)]
    pub order_mode: SweepOrder,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.n, &[self.k], &[self.budget_t], self.iterations)
    }
}

fn validate_common(n: usize, k_values: &[usize], t_values: &[u64], iterations: u64) -> Result<()> {
    if n == 0 {
        return Err(NkError::domain("n must be at least 1"));
    }
    if let Some(k) = k_values.iter().find(|&&k| k >= n) {
        return Err(NkError::domain(format!("k = {k} outside 0..={}", n - 1)));
    }
    if t_values.contains(&0) {
        return Err(NkError::ZeroBudget);
    }
    if iterations == 0 {
        return Err(NkError::domain("iterations must be at least 1"));
    }
    Ok(())
}

/// Outcome of [`run_batch`]. `fitness_difference` is the paired SMMLS minus
/// IMMLS final fitness, present only when both walkers ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub spec: ExperimentSpec,
    pub smmls: Option<AggregateStats>,
    pub immls: Option<AggregateStats>,
    pub fitness_difference: Option<Summary>,
}

#[derive(Debug, Clone, Copy)]
struct Series {
    n: usize,
    k: usize,
    scheme: DependencyScheme,
    order: SweepOrder,
    master_seed: u64,
    algorithms: AlgorithmSelection,
}

#[derive(Debug, Clone, Copy)]
struct PairedWalks {
    smmls: Option<WalkMetrics>,
    immls: Option<WalkMetrics>,
}

/// The landscape of replication `r`.
pub fn replication_landscape(
    n: usize,
    k: usize,
    scheme: DependencyScheme,
    master_seed: u64,
    r: u64,
) -> Result<Landscape> {
    let options = GenerateOptions {
        storage: TableStorage::Auto,
        ..Default::default()
    };
    let seed = rng::derive_seed(master_seed, StreamTag::Landscape, r);
    Landscape::generate_with(n, k, scheme, seed, options)
}

/// The starting configuration of replication `r`.
pub fn replication_start(n: usize, master_seed: u64, r: u64) -> Result<Configuration> {
    Configuration::random(n, &mut rng::derived_stream(master_seed, StreamTag::Start, r))
}

/// One replication evaluated at every budget in `budgets`.
fn replicate(series: &Series, r: u64, budgets: &[u64]) -> Result<Vec<PairedWalks>> {
    let landscape = replication_landscape(series.n, series.k, series.scheme, series.master_seed, r)?;
    let start = replication_start(series.n, series.master_seed, r)?;
    budgets
        .iter()
        .map(|&budget| {
            let smmls = if series.algorithms.smmls() {
                let mut stream = rng::derived_stream(series.master_seed, StreamTag::Smmls, r);
                let walk = run_smmls(&landscape, &start, Meter::new(budget)?, &mut stream)?;
                Some(WalkMetrics::from_result(&walk, budget))
            } else {
                None
            };
            let immls = if series.algorithms.immls() {
                let mut stream = rng::derived_stream(series.master_seed, StreamTag::Immls, r);
                let walk = run_immls(&landscape, &start, Meter::new(budget)?, series.order, &mut stream)?;
                Some(WalkMetrics::from_result(&walk, budget))
            } else {
                None
            };
            Ok(PairedWalks { smmls, immls })
        })
        .collect()
}

/// Runs all replications in parallel; the result is indexed `[budget][replication]`.
fn run_series(series: &Series, iterations: u64, budgets: &[u64]) -> Result<Vec<Vec<PairedWalks>>> {
    let per_replication: Vec<Vec<PairedWalks>> = (0..iterations)
        .into_par_iter()
        .map(|r| replicate(series, r, budgets))
        .collect::<Result<_>>()?;
    Ok((0..budgets.len())
        .map(|b| per_replication.iter().map(|walks| walks[b]).collect())
        .collect())
}

struct CellStats {
    smmls: Option<AggregateStats>,
    immls: Option<AggregateStats>,
    difference: Option<Summary>,
}

fn reduce_cell(walks: &[PairedWalks]) -> CellStats {
    let smmls: Vec<WalkMetrics> = walks.iter().filter_map(|w| w.smmls).collect();
    let immls: Vec<WalkMetrics> = walks.iter().filter_map(|w| w.immls).collect();
    let difference = (!smmls.is_empty() && !immls.is_empty()).then(|| {
        smmls
            .iter()
            .zip(&immls)
            .map(|(s, i)| s.final_fitness - i.final_fitness)
            .collect::<RunningStats>()
            .summary()
    });
    CellStats {
        smmls: (!smmls.is_empty()).then(|| AggregateStats::from_walks(&smmls)),
        immls: (!immls.is_empty()).then(|| AggregateStats::from_walks(&immls)),
        difference,
    }
}

/// Replicates one walker configuration over `iterations` landscapes.
pub fn run_batch(spec: &ExperimentSpec) -> Result<BatchResult> {
    spec.validate()?;
    let series = Series {
        n: spec.n,
        k: spec.k,
        scheme: spec.scheme,
        order: spec.order_mode,
        master_seed: spec.master_seed,
        algorithms: spec.algorithm,
    };
    let by_budget = run_series(&series, spec.iterations, &[spec.budget_t])?;
    let cell = reduce_cell(&by_budget[0]);
    Ok(BatchResult {
        spec: spec.clone(),
        smmls: cell.smmls,
        immls: cell.immls,
        fitness_difference: cell.difference,
    })
}

/// Paired SMMLS/IMMLS comparison over a `k x T` grid at fixed `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub k_values: Vec<usize>,
    pub t_values: Vec<u64>,
    pub iterations: u64,
    #[serde(with = "crate::seed_serde")]
    pub master_seed: u64,
    #[serde(default)]
    pub scheme: DependencyScheme,
    #[serde(default)]
    pub order_mode: SweepOrder,
}

impl GridSpec {
    /// `n = 16`, every `k`, the default budgets.
    pub fn standard(n: usize, iterations: u64, master_seed: u64) -> Self {
        Self {
            n,
            k_values: (0..n).collect(),
            t_values: DEFAULT_T_VALUES.to_vec(),
            iterations,
            master_seed,
            scheme: DependencyScheme::Random,
            order_mode: SweepOrder::Fixed,
        }
    }
}

fn comparison_rows(n: usize, k: usize, t_values: &[u64], cells: &[Vec<PairedWalks>]) -> Vec<ComparisonRow> {
    t_values
        .iter()
        .zip(cells)
        .map(|(&t, walks)| {
            let cell = reduce_cell(walks);
            let s = cell.smmls.expect("both walkers ran");
            let i = cell.immls.expect("both walkers ran");
            let d = cell.difference.expect("both walkers ran");
            ComparisonRow {
                n,
                k,
                k_over_n: k as f64 / n as f64,
                t,
                fitness_difference: d.mean,
                fitness_difference_se: d.std_error,
                final_fitness_smmls: s.final_fitness.mean,
                final_fitness_smmls_se: s.final_fitness.std_error,
                final_fitness_immls: i.final_fitness.mean,
                final_fitness_immls_se: i.final_fitness.std_error,
                consumption_pct_smmls: s.resource_consumption_pct.mean,
                consumption_pct_immls: i.resource_consumption_pct.mean,
                consumption_pct_immls_se: i.resource_consumption_pct.std_error,
                improvement_smmls: s.fitness_improvement.mean,
                improvement_smmls_se: s.fitness_improvement.std_error,
                improvement_immls: i.fitness_improvement.mean,
                improvement_immls_se: i.fitness_improvement.std_error,
                moves_smmls: s.successful_moves.mean,
                moves_smmls_se: s.successful_moves.std_error,
                moves_immls: i.successful_moves.mean,
                moves_immls_se: i.successful_moves.std_error,
                equilibrium_fraction_immls: i.equilibrium_fraction,
            }
        })
        .collect()
}

pub fn compare_grid(spec: &GridSpec) -> Result<ComparisonTable> {
    validate_common(spec.n, &spec.k_values, &spec.t_values, spec.iterations)?;
    let mut rows = Vec::with_capacity(spec.k_values.len() * spec.t_values.len());
    if !spec.t_values.is_empty() {
        for &k in &spec.k_values {
            let series = Series {
                n: spec.n,
                k,
                scheme: spec.scheme,
                order: spec.order_mode,
                master_seed: spec.master_seed,
                algorithms: AlgorithmSelection::Both,
            };
            let cells = run_series(&series, spec.iterations, &spec.t_values)?;
            rows.extend(comparison_rows(spec.n, k, &spec.t_values, &cells));
        }
    }
    Ok(ComparisonTable {
        metadata: TableMetadata {
            axis: Axis::K,
            n_values: vec![spec.n],
            scheme: spec.scheme,
            order_mode: spec.order_mode,
            iterations: spec.iterations,
            master_seed: spec.master_seed,
            version: crate::VERSION.to_string(),
            command: None,
        },
        rows,
    })
}

/// Maximal-interdependence sweep: `k = n - 1` for each `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSpec {
    pub n_values: Vec<usize>,
    pub t_values: Vec<u64>,
    pub iterations: u64,
    #[serde(with = "crate::seed_serde")]
    pub master_seed: u64,
    #[serde(default)]
    pub scheme: DependencyScheme,
    #[serde(default)]
    pub order_mode: SweepOrder,
}

impl RobustnessSpec {
    /// `n = 16..=20`.
    pub fn standard(t_values: Vec<u64>, iterations: u64, master_seed: u64) -> Self {
        Self {
            n_values: (16..=20).collect(),
            t_values,
            iterations,
            master_seed,
            scheme: DependencyScheme::Random,
            order_mode: SweepOrder::Fixed,
        }
    }
}

pub fn robustness_sweep(spec: &RobustnessSpec) -> Result<ComparisonTable> {
    if spec.iterations == 0 {
        return Err(NkError::domain("iterations must be at least 1"));
    }
    let mut rows = Vec::new();
    for &n in &spec.n_values {
        if n == 0 {
            return Err(NkError::domain("n must be at least 1"));
        }
        let grid = GridSpec {
            n,
            k_values: vec![n - 1],
            t_values: spec.t_values.clone(),
            iterations: spec.iterations,
            master_seed: spec.master_seed,
            scheme: spec.scheme,
            order_mode: spec.order_mode,
        };
        rows.extend(compare_grid(&grid)?.rows);
    }
    Ok(ComparisonTable {
        metadata: TableMetadata {
            axis: Axis::KOverN,
            n_values: spec.n_values.clone(),
            scheme: spec.scheme,
            order_mode: spec.order_mode,
            iterations: spec.iterations,
            master_seed: spec.master_seed,
            version: crate::VERSION.to_string(),
            command: None,
        },
        rows,
    })
}

/// Measured SMMLS mean final fitness at `n = 16`, `k in {0, 2, 4, 8, 15}`
/// beside the published reference rows.
pub fn dock(iterations: u64, master_seed: u64) -> Result<DockingTable> {
    let mut measured = Vec::with_capacity(DOCKING_K.len());
    let mut std_error = Vec::with_capacity(DOCKING_K.len());
    for &k in &DOCKING_K {
        let batch = run_batch(&ExperimentSpec {
            n: DOCKING_N,
            k,
            scheme: DependencyScheme::Random,
            algorithm: AlgorithmSelection::Smmls,
            budget_t: DOCKING_BUDGET,
            iterations,
            master_seed,
            order_mode: SweepOrder::Fixed,
        })?;
        let stats = batch.smmls.expect("smmls requested");
        measured.push(stats.final_fitness.mean);
        std_error.push(stats.final_fitness.std_error);
    }
    let deviations = measured
        .iter()
        .zip(REFERENCE_SMMLS)
        .map(|(m, p)| (m - p).abs())
        .collect();
    Ok(DockingTable {
        metadata: DockingMetadata {
            n: DOCKING_N,
            budget: DOCKING_BUDGET,
            iterations,
            master_seed,
            scheme: DependencyScheme::Random,
            walk_length: format!("run to stagnation (budget {DOCKING_BUDGET})"),
            tolerance: DOCKING_TOLERANCE,
            version: crate::VERSION.to_string(),
            command: None,
        },
        k_values: DOCKING_K.to_vec(),
        kauffman: REFERENCE_KAUFFMAN.to_vec(),
        sendero: REFERENCE_SENDERO.to_vec(),
        published_smmls: REFERENCE_SMMLS.to_vec(),
        measured_smmls: measured,
        measured_std_error: std_error,
        deviations,
    })
}

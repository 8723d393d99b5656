//! NK fitness landscapes and metered myopic local search.
//!
//! The crate is organised bottom-up:
//!
//! * [`landscape`] generates, evaluates and exhaustively analyses NK landscapes.
//! * [`search`] runs the two metered walkers: SMMLS (one random flip per time
//!   step for exactly `T` steps) and IMMLS (sequential first-improvement sweep
//!   that stops at equilibrium or when the meter runs dry).
//! * [`experiment`] replicates walks over many seeded landscapes and runs the
//!   standard parameter sweeps.
//! * [`report`] turns results into CSV/JSON files and console summaries.
//! * [`rng`] holds the seed-derivation scheme every other module draws from.

pub mod error;
pub mod experiment;
pub mod landscape;
pub mod report;
pub mod rng;
pub mod search;
mod seed_serde;
pub mod stats;

pub use error::{NkError, Result};
pub use experiment::{
    compare_grid, dock, robustness_sweep, run_batch, AlgorithmSelection, BatchResult,
    ExperimentSpec, GridSpec, RobustnessSpec,
};
pub use landscape::{
    Configuration, DependencyScheme, GenerateOptions, GlobalOptimumReport, InteractionMap,
    Landscape, TableStorage,
};
pub use report::{ComparisonRow, ComparisonTable, DockingTable, Summarize};
pub use search::{
    run_immls, run_smmls, Algorithm, Evaluation, Meter, SweepOrder, Termination, WalkObserver,
    WalkResult,
};
pub use stats::{AggregateStats, Summary};

/// Version string stamped into every emitted table.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

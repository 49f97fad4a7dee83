//! Configuration-driven disorder ensembles and their output tables.

mod config;
mod emit;
mod lemma_sweep;
mod run;

pub use config::{BasisKind, ExperimentConfig, InitialOperator};
pub use emit::emit;
pub use lemma_sweep::{run_lemma_sweep, LemmaSweep, LemmaSweepRow};
pub use run::{
    aggregate, run_experiment, run_experiment_with, Exclusion, MuSummary, Pipeline,
    RealizationResult, ResultsBundle, RunOptions, SeriesStats, MAX_FAILURE_FRACTION,
};

//! Experiment harness: repeated seeded runs, summary statistics against the
//! emulated company schedule, and an exhaustive oracle for tiny instances.

mod brute;
mod experiment;
mod stats;
mod suite;

pub use brute::{brute_force, BruteForce, BRUTE_FORCE_MAX_GENES};
pub use experiment::{
    run_algorithm, run_experiment, summarise, write_summary_csv, AlgorithmConfig, Experiment,
    ExperimentSpec, InstanceSource, RunRecord, SummaryRow, CSV_HEADER,
};
pub use stats::{mean, sample_sd};
pub use suite::{scenario_suite, suite_algorithms, Scale, SuiteOptions};

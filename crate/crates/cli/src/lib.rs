//! Experiment runner for polynomial-preconditioned GMRES.
//!
//! [`parse_config`] turns `run` arguments (plus an optional TOML file) into an
//! [`ExperimentConfig`]; [`run_experiment`] solves the system and produces a
//! per-iteration history and a JSON summary with cost counters.

pub mod config;
pub mod run;

pub use config::{
    parse_config, ConfigError, DegreeChoice, ExperimentConfig, GeneratorSpec, MatrixSource, OutputFormat,
    PolySeed, RhsMode, RunArgs,
};
pub use run::{generate, read_vector, run_experiment, write_vector, HistoryRow, Report, Summary};

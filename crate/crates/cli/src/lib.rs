//! Configuration loading and experiment dispatch for the `learncap` binary.

mod config;
mod run;

pub use config::{
    load_config, parse_config, ConfigError, ExperimentConfig, ExperimentKind, FunctionSource, PresetChoice,
};
pub use run::{run_experiment, RunError, RunOptions, RunOutcome};

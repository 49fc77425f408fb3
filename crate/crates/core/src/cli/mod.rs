//! Batch commands behind the `polarface` binary.

mod commands;
mod config;

pub use commands::{
    cmd_experiment, cmd_extract, cmd_synth, cmd_synth_dataset, oracle_config, with_workers, CommandOutput,
    SynthPattern, ORACLE_SIZE,
};
pub use config::{ExperimentKind, RunConfig};

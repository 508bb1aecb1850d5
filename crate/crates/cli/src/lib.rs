//! Experiment presets for the `qnoise` command line tool.

pub mod config;
pub mod run;

pub use config::{parse_config, parse_config_as, ConfigError, ExperimentConfig, Preset};
pub use run::{run_experiment, RunError, SummaryRow};

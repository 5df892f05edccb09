//! Configuration, parsing and pipeline orchestration for the `ktforge` tool.

pub mod config;
pub mod expr;
pub mod run;

pub use config::{parse_config, parse_config_with, print_config, validate, Format, Pipeline, RunConfig};
pub use run::{exit, run, Report, RunError};

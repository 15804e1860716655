//! Experiment runner behind the `kestenlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod tasks;

pub use config::{ExperimentConfig, Overrides};
pub use error::CliError;
pub use runner::{run, RunOptions};
pub use tasks::Task;

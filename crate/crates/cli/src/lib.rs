//! Command-line front end for the qwave experiments.

pub mod catalog;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;

pub use catalog::{catalog, ExperimentInfo};
pub use config::{Format, RunConfig};
pub use error::CliError;

//! Command-line front end for `spikegnn`: evaluate a configuration, search
//! the hyperparameter grid, or dump neuron traces.

pub mod commands;
pub mod config;
pub mod error;

pub use config::RunConfig;
pub use error::{Failure, Kind};

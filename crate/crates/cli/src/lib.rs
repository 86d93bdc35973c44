//! Experiment harness around the `shallownet` library: replicated sweeps,
//! bound curves, complexity estimates and the interpolation demo, each
//! writing CSV/JSON/SVG artifacts.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod svg;
pub mod sweep;

pub use error::{CliError, Result};

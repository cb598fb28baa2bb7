//! Scenario runner: configuration, figure recipes, sweeps and emitters.

pub mod app;
pub mod config;
pub mod emit;
pub mod error;
pub mod recipes;
pub mod sweep;

pub use config::ScenarioConfig;
pub use error::CliError;

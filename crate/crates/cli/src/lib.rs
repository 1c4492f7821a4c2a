//! Scenario runner for the two-qutrit rotor: config parsing, sweeps, time
//! evolution, continuum checks and the invariant suite.

pub mod config;
pub mod error;
pub mod invariants;
pub mod run;

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use run::{run_scenario, Table};

//! Scenario runner: key=value configs in, CSV files and plot scripts out.

pub mod checks;
pub mod config;
pub mod csv;
pub mod plots;
pub mod scenarios;

pub use config::{parse_config, parse_config_str, ConfigError, ExperimentConfig, Scenario};
pub use scenarios::{run_scenario, write_report, ScenarioReport};

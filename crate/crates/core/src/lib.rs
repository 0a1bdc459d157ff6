//! Round-based energy simulator for two-level heterogeneous wireless sensor
//! networks, comparing zonal Z-SEP against SEP and LEACH.

pub mod cli;
pub mod deployment;
pub mod election;
pub mod error;
pub mod model;
pub mod protocols;
pub mod radio;
pub mod report;
pub mod simulator;

pub use error::{ConfigError, Error, Result};
pub use model::{NodeKind, Position, Protocol, RadioParams, ScenarioConfig};
pub use simulator::{aggregate_runs, run, RunStatistics, RunSummary};

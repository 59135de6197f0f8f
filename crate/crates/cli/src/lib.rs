//! Campaign runner for the decomposition toolkit: configuration, report
//! rows, aggregation and the scaled acceptance checks behind `svg verify`.

#![allow(clippy::needless_range_loop)]

pub mod campaign;
pub mod config;
pub mod error;
pub mod report;
pub mod rows;
pub mod verify;

pub use campaign::{run_decompose, run_optimize, CampaignSummary};
pub use config::{CampaignConfig, Decomposer, Format};
pub use error::{CliError, CliResult};

//! Campaign runner behind the `chebext` binary.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;

pub use config::{parse_config, Campaign, CampaignConfig, ConfigError, Plan};
pub use report::{run, summary, write_csv, write_outputs, Outcome, ReportError};

/// The configuration used when `--config` is not given.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/delta-sweep.conf");

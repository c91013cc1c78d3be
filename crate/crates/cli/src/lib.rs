//! Batch front-end for the mixlap solvers: configuration handling and the
//! `solve`, `barrier`, `verify` and `counterexample` runs.

pub mod config;
pub mod run;

pub use config::{parse_config, validate, Command, ConfigError, LoadSpec, RawConfig, RunConfig};
pub use run::{run, RunError, RunOutcome};

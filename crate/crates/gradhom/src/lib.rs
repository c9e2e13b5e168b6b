//! Config, report and table formats around `gradhom-core`, and the command
//! implementations behind the `gradhom` binary.

pub mod cli;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod tables;
pub mod tensor_json;

pub use error::{CliError, Result};

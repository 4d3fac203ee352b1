//! Library side of the `rmem` command: configuration documents, runners for
//! each subcommand, and CSV/JSON emission.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{RunConfig, SweepSpec};
pub use error::{CliError, CliResult};

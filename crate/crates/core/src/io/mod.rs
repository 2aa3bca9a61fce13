//! Run configuration, output tables and the command implementations.

pub mod commands;
pub mod config;
pub mod table;
pub mod verify;

pub use config::{GridSpec, OutputFormat, RunConfig, Spacing, Tolerances};
pub use table::{Cell, Table};
pub use verify::{run_verify, NrRange, Status, Suite, VerifyReport};

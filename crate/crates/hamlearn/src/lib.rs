//! File formats, seeded experiment harness and command line for `hamlearn-core`.

pub mod bench;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod formats;
pub mod harness;

pub use error::CliError;
pub use hamlearn_core as core;

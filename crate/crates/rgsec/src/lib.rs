//! File formats, numerics and the command-line front end for the
//! `rgsec-core` engine.

pub mod builtins;
pub mod cli;
pub mod document;
pub mod error;
pub mod machine;
pub mod numeric;
pub mod simulate;
pub mod svg;

pub use error::{CliError, CliResult};

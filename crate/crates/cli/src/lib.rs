//! Command-line front end for the decoder: decode and sample shot streams,
//! benchmark the optimization levels against each other, cross-check against
//! the exhaustive reference, and generate synthetic models.

pub mod commands;
pub mod cputime;
pub mod report;
pub mod synth;

pub use commands::{run, Cli, CliError};

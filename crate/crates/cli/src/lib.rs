//! Library surface of the jetcurv command-line tool: run configuration,
//! report model, and the command implementations.

pub mod commands;
pub mod config;
pub mod report;

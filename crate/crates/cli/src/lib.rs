//! Expression language, identity suites and the `msc` command line.

pub mod commands;
pub mod dsl;
pub mod suites;

//! Library half of the command line tool, so the integration and
//! acceptance tests can drive scenarios and reports in-process.

pub mod config;
pub mod dd;
pub mod dump;
pub mod report;
pub mod scenarios;

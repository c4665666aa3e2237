//! Command-line front end: configuration, the acceptance suite, reports,
//! figures and artifact files.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod figure;
pub mod output;
pub mod report;

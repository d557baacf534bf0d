//! Experiment driver: corpus synthesis, named verification suites, reports and plot data.

pub mod config;
pub mod corpus;
pub mod plot;
pub mod report;
pub mod run;
pub mod suites;

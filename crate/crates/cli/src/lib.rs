//! Command-line front end and pipeline runner for langconf.

pub mod config;
pub mod error;
pub mod ingest;
pub mod lideval;
pub mod output;
pub mod pipeline;
pub mod synth;

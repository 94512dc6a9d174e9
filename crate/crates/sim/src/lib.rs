//! Scenario-driven batch simulator for the manipulator controllers in
//! `manip-core`: JSON scenario and model files, a fixed-step closed-loop
//! runner with CSV trace output and a metrics sidecar, and built-in
//! demo scenarios.

pub mod config;
pub mod demos;
pub mod metrics;
pub mod model_file;
pub mod runner;

pub use config::{resolve, Resolved, Scenario};
pub use metrics::RunMetrics;
pub use runner::{run_scenario, AbortReason, RunOutcome};

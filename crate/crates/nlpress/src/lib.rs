//! Experiment runner for the `nlpress-core` pressure laboratory.
//!
//! A run is described by a TOML file (see [`config`]); [`run::run`] executes
//! its tasks on a worker pool and writes CSV/JSON outputs.

pub mod config;
pub mod run;

pub use config::{load, validate, Diagnostic, Experiment, Overrides, Precision, Task};
pub use run::{run, RunError, RunSettings, Summary};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const AUDIT_FAILED: i32 = 1;
    pub const INVALID_CONFIG: i32 = 2;
    pub const LIMIT: i32 = 3;
    pub const RUN_ERROR: i32 = 4;
}

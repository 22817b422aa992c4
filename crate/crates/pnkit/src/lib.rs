//! Verification driver for the `pnkit-core` models: seeded sampling, the
//! check registry, JSON reports, CSV tables and the groupoid JSON front end.

pub mod cache;
pub mod checks;
pub mod config;
pub mod controls;
pub mod groupoid_cli;
pub mod io;
pub mod report;
pub mod sampling;
pub mod suite;

pub use config::{ConfigError, Manifold, Pinned, RunConfig};
pub use report::{CheckResult, Comparison, VerificationReport};
pub use suite::{run_suite, SuiteError};

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const NOT_COMPOSABLE: i32 = crate::groupoid_cli::EXIT_NOT_COMPOSABLE;
    pub const OUTSIDE_POLYTOPE: i32 = crate::groupoid_cli::EXIT_OUTSIDE_POLYTOPE;
}

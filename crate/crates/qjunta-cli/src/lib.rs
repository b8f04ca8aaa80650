//! Command-line driver for the junta testing and learning simulator:
//! instance generation, tester and learner runs, invariant sweeps, and
//! query-count benchmarks, all emitting versioned machine-readable reports.

pub mod commands;
pub mod error;
pub mod report;
pub mod verify_suites;

pub use commands::{
    cmd_bench, cmd_gen, cmd_learn, cmd_test, cmd_verify, trial_rng, BenchArgs, GenArgs, LearnArgs,
    TestArgs, VerifyArgs,
};
pub use error::CliError;
pub use report::{ExperimentReport, REPORT_SCHEMA};
pub use verify_suites::CheckOutcome;

//! Command-line front end, JSON formats and oracle harness for `vcreg-core`.
//!
//! Every computing command produces a [`report::RunReport`] whose
//! `verification` section lists the checks run on the result; the process
//! exits 0 only if all of them pass, 1 on a verification failure and 2 on
//! bad input.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod oracle;
pub mod report;
pub mod selftest;
pub mod threads;

pub use cli::{execute, run, Outcome};
pub use error::CliError;
pub use report::RunReport;

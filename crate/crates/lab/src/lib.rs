//! Command-line laboratory around `cdma-capacity`: thread-pool simulation,
//! CSV artifacts with run manifests, and theory/simulation comparison.

pub mod cli;
pub mod compare;
mod error;
pub mod format;
pub mod manifest;
pub mod parallel;
pub mod tables;

pub use error::{exit_code, LabError};

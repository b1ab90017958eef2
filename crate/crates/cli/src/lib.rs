//! Experiment driver for `profilekit`: family descriptors, the fixed
//! corpus, verification suites and report emission.

pub mod config;
pub mod corpus;
pub mod family;
pub mod pinned;
pub mod report;
pub mod suites;

pub use config::{ExperimentConfig, Suite};
pub use family::FamilySpec;
pub use report::{emit_report, CaseRecord, Claim, ReportFormat, SuiteReport};
pub use suites::run_suite;

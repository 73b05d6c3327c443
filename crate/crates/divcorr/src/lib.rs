//! Configuration, seeded instances, reports and the command line harness
//! around `divcorr-core`.

pub mod cli;
pub mod config;
pub mod instances;
pub mod report;
pub mod suites;

pub use config::{ConfigError, Mode, RunConfig};
pub use instances::{seed_instances, seed_instances_of, IdentityKind, Profile};
pub use report::CheckRecord;

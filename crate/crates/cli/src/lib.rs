//! Scenario files and the runner behind the `contactflow` binary.

pub mod config;
pub mod error;
pub mod scenario;

pub use config::{default_config, parse_config, Integrator, ModelSection, OutputSection, RunSection, ScenarioConfig, VerifySection};
pub use error::{CliError, ConfigError, Result};
pub use scenario::{build_model, run_scenario, verify_model, write_csv, IntegrationSummary, RunReport, VerificationSummary};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const VERIFICATION_FAILED: i32 = 2;
}

//! Scenario configs, the deterministic runner, parameter sweeps, CSV output,
//! and the runtime verification harness.

pub mod config;
pub mod fixtures;
pub mod report;
pub mod rng;
pub mod runner;
pub mod sweep;
pub mod verify;

pub use config::{
    load_scenario, parse_scenario, ConfigError, ExperimentKind, InitialData, Scenario, SweepGrid,
};
pub use report::{CheckFlag, NamedScalar, RunReport, TimedValue};
pub use runner::{run_scenario, RunError, SERIES_HEADER};
pub use sweep::{sweep, SweepCell, SweepError, SweepSummary, SWEEP_HEADER};
pub use verify::{verify_all, CheckResult, VerifySummary};

//! Command-line front end: scenario runs from INI files, verification suites
//! and the nonlocal-rod kernel benchmark.

pub mod bench;
pub mod cli;
pub mod config;
pub mod scenario;
pub mod verify;

pub use bench::{fit_loglog_slope, run_kernel_benchmark, write_bench_csv, BenchRow, DEFAULT_REPEATS, DEFAULT_SIZES};
pub use config::{parse_config, ConfigError, ConfigIssue, ScenarioConfig};
pub use scenario::{build_scenario, default_config, run_scenario, write_trajectory_csv, Scenario, MODELS};
pub use verify::{run_suite, Check, Suite, SuiteReport};
pub use cli::{run_cli, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFY_FAILED};

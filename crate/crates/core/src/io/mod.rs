//! Scenario files, presets, run outputs, sweeps and verification.

pub mod config;
pub mod output;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use config::{emit_config, parse_config, parse_config_str, preset, preset_config, read_config_text, PRESETS};
pub use output::{default_output_dir, exit_code_for, run_scenario, write_outputs, RunOutcome};
pub use sweep::{sweep, SweepPoint, SweepSpec};
pub use verify::{verify, verify_record, Status, VerifyReport};

//! Scenario files, tabular output, run manifests and the command layer the
//! `thirring` binary dispatches to.

mod commands;
mod config;
mod manifest;
mod output;

pub use commands::{execute, run, write_failure_manifest, Command, EdTask, Report, RunOutput};
pub use config::{
    apply_overrides, resolve_config_path, CorrelationBlock, EvolutionBlock, GridBlock, LatticeBlock, NPointBlock,
    PulseBlock, ScenarioConfig, SweepBlock, SweepKind, Tolerances, CONFIG_DIR_ENV, SCHEMA_VERSION,
};
pub use manifest::{ErrorRecord, OutputRecord, RunManifest, MANIFEST_FILE};
pub use output::{fmt_f64, sha256_hex, write_atomic, Table};

//! Experiment pipelines, run manifests and run comparisons on top of
//! `fsamp-core`.
//!
//! A run goes through fixed stages (design, measure, reconstruct, render,
//! metrics) and leaves one file per stage plus a `manifest.json` that
//! hashes every artifact. Reruns from a manifest must reproduce the design
//! bytes and the report numbers.

pub mod compare;
pub mod error;
pub mod experiment;
pub mod manifest;
pub mod witness;

pub use compare::{compare_runs, Comparison, ComparisonRow};
pub use error::{CliError, CliResult};
pub use experiment::{preset, run_experiment, DesignSpec, ExperimentSpec, MethodSpec, RunReport, PRESETS};
pub use manifest::{rerun_from_manifest, verify_rerun, RerunCheck, RunManifest};

//! Experiment harness around [`sbvqe_core`]: declarative run configuration,
//! parameter checkpoints, and batch drivers that fan replicas out over a
//! thread pool and write learning curves, checkpoints, and summaries to disk.
//!
//! The `sbvqe` binary is a thin clap wrapper over [`runner`]; everything the
//! CLI can do is callable as a library function, which is how the integration
//! tests drive it.

pub mod checkpoint;
pub mod config;
pub mod error;
pub mod runner;

pub use checkpoint::Checkpoint;
pub use config::{AnsatzFamily, ExperimentConfig, InsertPosition, Overrides};
pub use error::{Error, Result};
pub use runner::{
    reference_ground, run_exact, run_penalty, run_solve, run_sweep_setups, run_transfer,
    ExactMethod, ExactReport, SetupCell, SolveReport, SolveRow, SummaryRow, TransferReport,
    TransferStep,
};

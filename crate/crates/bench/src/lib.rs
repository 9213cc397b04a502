//! Seeded experiment harness for the boolprop testers: instance
//! generation, parallel trial orchestration and CSV/JSON reporting.

pub mod config;
pub mod experiment;
pub mod instance;

pub use config::Settings;
pub use experiment::{run_experiment, run_tester, ExperimentConfig, Row, StatsReport};
pub use instance::{generate_instance, ClassSpec, Instance, InstanceKind, InstanceSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] boolprop::Error),
    #[error("far-instance generation failed: {0}")]
    FarBudget(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub fn is_capability(&self) -> bool {
        matches!(self, Self::Core(boolprop::Error::Capability(_)))
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the stream named by `path` under `master`; distinct paths give
/// unrelated seeds regardless of how trials are scheduled.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |h, &p| splitmix64(h ^ p))
}

//! Scenario catalogue, micro/macro experiments, metrics and snapshot files.

pub mod compare;
pub mod metrics;
pub mod scenario;
pub mod snapshot;

use std::path::{Path, PathBuf};

pub use compare::{run_comparison_1d, run_comparison_batch, write_comparison_csv, CompareOptions, ComparisonRow};
pub use metrics::{l2_distance, local_max_count, pattern_metrics, PatternMetrics};
pub use scenario::{build_scenario, Scenario, ScenarioName};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SnapshotSeries};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: missing header key `{key}`")]
    MissingKey { path: PathBuf, key: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("density has zero total mass")]
    ZeroMass,
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Hydro(#[from] crate::hydro::HydroError),
    #[error(transparent)]
    Micro(#[from] crate::micro::MicroError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

//! Tower database ingestion, run configuration, synthetic datasets, report
//! exports and the command-line front end.

pub mod cli;
pub mod config;
pub mod export;
pub mod sample;
pub mod towers;

use thiserror::Error;

use crate::geo::GeoError;
use crate::propagation::PropagationError;
use crate::reassign::ReassignError;
use crate::regulatory::RegulatoryError;
use crate::wsmap::WsmapError;

pub use cli::cli_main;
pub use config::RunConfig;
pub use sample::{gen_sample_towers, DensityProfile};
pub use towers::{parse_tower_csv, read_tower_csv, write_tower_csv};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("sample generation: {0}")]
    Sample(String),
    #[error("png: {0}")]
    Png(#[from] png::EncodingError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    Regulatory(#[from] RegulatoryError),
    #[error(transparent)]
    Wsmap(#[from] WsmapError),
    #[error(transparent)]
    Reassign(#[from] ReassignError),
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.display().to_string(),
        source,
    }
}

use finbench_core::CoreError;
use finbench_engine::EngineError;
use finbench_workloads::WorkloadError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{file}: row {row}: {msg}")]
    Row {
        file: String,
        row: usize,
        msg: String,
    },
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
}

impl From<CoreError> for DatagenError {
    fn from(e: CoreError) -> Self {
        DatagenError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DatagenError>;

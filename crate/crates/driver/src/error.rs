use thiserror::Error;

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("config: {0}")]
    Config(String),
    #[error("insufficient updates: stream covers {available_micros} us of schedule, run needs {needed_micros} us")]
    InsufficientUpdates {
        available_micros: u64,
        needed_micros: u64,
    },
    #[error("results log: {0}")]
    Log(String),
    #[error("validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Workload(#[from] finbench_workloads::WorkloadError),
}

pub type Result<T> = std::result::Result<T, DriverError>;

use finbench_engine::EngineError;
use finbench_workloads::WorkloadError;

#[derive(Debug, thiserror::Error)]
pub enum AcidError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("setup: {0}")]
    Setup(String),
    #[error("client failed: {0}")]
    Client(String),
}

pub type Result<T> = std::result::Result<T, AcidError>;

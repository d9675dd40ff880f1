use finbench_engine::EngineError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorkloadError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("withdraw target account {0} is not a card account")]
    NotCard(u64),
    #[error("bad parameters: {0}")]
    Params(String),
}

impl WorkloadError {
    /// True when retrying the operation may succeed.
    pub fn is_conflict(&self) -> bool {
        matches!(self, WorkloadError::Engine(e) if e.is_conflict())
    }
}

impl From<finbench_core::CoreError> for WorkloadError {
    fn from(e: finbench_core::CoreError) -> Self {
        WorkloadError::Params(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, WorkloadError>;

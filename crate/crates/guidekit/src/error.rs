use guidekit_core::DeviceError;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("tutorial has no steps")]
    EmptyTutorial,
    #[error("invalid app definition: {0}")]
    Validation(#[from] DeviceError),
}

impl FormatError {
    /// Syntax problems become `Parse`, well-formed JSON of the wrong shape `Schema`.
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        match err.classify() {
            serde_json::error::Category::Data => FormatError::Schema(err.to_string()),
            _ => FormatError::Parse(err.to_string()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("storage error: {0}")]
    Storage(#[from] std::io::Error),
}

impl From<FormatError> for StoreError {
    fn from(err: FormatError) -> Self {
        StoreError::Schema(err.to_string())
    }
}

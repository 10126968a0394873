use thiserror::Error;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum QmsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric failure in {op}: {detail}")]
    Numeric { op: &'static str, detail: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spectral resolution failed: {0}")]
    SpectralResolution(String),

    #[error("ill-conditioned Jordan structure: {0}")]
    IllConditionedStructure(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error at {location}: {detail}")]
    Parse { location: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl QmsError {
    pub(crate) fn numeric(op: &'static str, detail: impl Into<String>) -> Self {
        QmsError::Numeric {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures caused by floating-point conditioning rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            QmsError::Numeric { .. }
                | QmsError::SpectralResolution(_)
                | QmsError::IllConditionedStructure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, QmsError>;

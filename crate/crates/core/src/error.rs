use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates an operation's precondition.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Shifted solves stayed singular after every shift perturbation.
    #[error("ill-conditioned shifted solve at E = {shift} after {retries} retries")]
    IllConditioned { shift: f64, retries: usize },

    #[error("eigenvalue-to-site matching is not a bijection: {duplicates} duplicated centres")]
    NotBijective { duplicates: usize },

    #[error("eigenvector set incomplete: have {have}, need {need}")]
    IncompleteEigenvectors { have: usize, need: usize },

    #[error("eigenvector is not localized (fitted decay base {0} <= 1)")]
    NotLocalized(f64),

    #[error("malformed spectrum file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

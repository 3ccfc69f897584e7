use matrix_core::MatrixError;
use rank_cert::CertError;
use rank_opt::OptError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: parse error at line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid generator request: {0}")]
    InvalidGen(String),
    #[error("{0}")]
    Usage(String),
    #[error("report serialization failed: {0}")]
    Report(#[from] serde_json::Error),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Opt(#[from] OptError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl HarnessError {
    /// Exit code contract: 1 for usage and IO problems, 2 when a constraint
    /// is infeasible at the requested rank or sparsity.
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Cert(CertError::RankTooHigh { .. })
            | HarnessError::Cert(CertError::SparsityTooHigh { .. })
            | HarnessError::Opt(OptError::Cert(CertError::RankTooHigh { .. }))
            | HarnessError::Opt(OptError::Cert(CertError::SparsityTooHigh { .. })) => 2,
            _ => 1,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

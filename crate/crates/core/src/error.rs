use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("constant curve: derivative vanishes everywhere, SRVF undefined")]
    ConstantCurve,

    #[error("zero-norm SRVF cannot be normalized")]
    ZeroNorm,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("antipodal points (angle {theta:.9} rad): log map undefined")]
    Antipodal { theta: f64 },

    #[error("antipodal pair at anchor {anchor}, curve {other}: angle {theta:.9} rad")]
    AntipodalPair { anchor: usize, other: usize, theta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("SVD did not converge")]
    SvdFailure,

    #[error(
        "non-finite iterate at iteration {iter} (primal residual {primal_residual:e}, step {step:e})"
    )]
    NonFinite {
        iter: usize,
        primal_residual: f64,
        step: f64,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Process exit status: 2 for bad parameters, 3 for bad data, 4 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::InvalidCurve(_)
            | Error::ConstantCurve
            | Error::ZeroNorm
            | Error::ShapeMismatch(_)
            | Error::Parse { .. }
            | Error::Dataset(_)
            | Error::Io { .. }
            | Error::Json { .. } => 3,
            Error::Antipodal { .. }
            | Error::AntipodalPair { .. }
            | Error::SvdFailure
            | Error::NonFinite { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("symbol stream must contain at least one symbol")]
    EmptyStream,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("size mismatch: {what} (expected {expected}, got {actual})")]
    Size {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("zero linewidth: coherence length is infinite")]
    InfiniteCoherence,

    #[error("MPI ratio rho = {0} gives infinite SIR")]
    InfiniteSir(f64),

    #[error("equalizer diverged at symbol {index}")]
    Divergence { index: usize },

    #[error("cannot slice non-finite value {0}")]
    Decision(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: plot rendering failed: {message}", path.display())]
    Plot { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 config, 3 divergence, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Divergence { .. } | Error::Decision(_) => 3,
            Error::Io { .. } | Error::Csv { .. } | Error::Plot { .. } => 4,
            _ => 2,
        }
    }
}

use std::fmt;
use std::process::ExitCode;

use crate::libsvm::LibsvmError;

/// Failure classes and their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 2,
    Data = 3,
    Numeric = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ExitKind,
    pub source: anyhow::Error,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn new(kind: ExitKind, source: impl Into<anyhow::Error>) -> Self {
        Self {
            kind,
            source: source.into(),
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Self::new(ExitKind::Usage, anyhow::anyhow!("{msg}"))
    }

    /// Reclassifies a core error raised while processing file contents.
    pub fn data(e: paretosmg_core::Error) -> Self {
        match e {
            paretosmg_core::Error::Numeric(_) => Self::new(ExitKind::Numeric, e),
            _ => Self::new(ExitKind::Data, e),
        }
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        Self {
            kind: self.kind,
            source: self.source.context(what.to_string()),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl From<paretosmg_core::Error> for CliError {
    fn from(e: paretosmg_core::Error) -> Self {
        let kind = match e {
            paretosmg_core::Error::Numeric(_) => ExitKind::Numeric,
            _ => ExitKind::Usage,
        };
        Self::new(kind, e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(ExitKind::Data, e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::new(ExitKind::Data, e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::new(ExitKind::Data, e)
    }
}

impl From<LibsvmError> for CliError {
    fn from(e: LibsvmError) -> Self {
        Self::new(ExitKind::Data, e)
    }
}

use std::fmt;
use std::io;

use forge_core::attnmap::AttnError;
use forge_core::corpus::CorpusError;
use forge_core::evalkit::EvalError;
use forge_core::interleave::InterleaveError;
use forge_core::jsonl::RecordError;
use forge_core::quality::QualityError;

/// Failure class; decides the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    Validation,
    Io,
}

impl Failure {
    pub fn exit_code(self) -> i32 {
        match self {
            Failure::Validation => 1,
            Failure::Io => 2,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Failure,
    pub message: String,
}

pub type CliResult<T = ()> = Result<T, CliError>;

impl CliError {
    pub fn validation(message: impl fmt::Display) -> Self {
        Self { kind: Failure::Validation, message: message.to_string() }
    }

    pub fn io(message: impl fmt::Display) -> Self {
        Self { kind: Failure::Io, message: message.to_string() }
    }

    pub fn context(self, what: impl fmt::Display) -> Self {
        Self { kind: self.kind, message: format!("{what}: {}", self.message) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::io(e)
        } else {
            CliError::validation(e)
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(_) => CliError::io(e),
            _ => CliError::validation(e),
        }
    }
}

impl From<RecordError> for CliError {
    fn from(e: RecordError) -> Self {
        match e {
            RecordError::Io(_) => CliError::io(e),
            _ => CliError::validation(e),
        }
    }
}

impl From<QualityError> for CliError {
    fn from(e: QualityError) -> Self {
        CliError::validation(e)
    }
}

impl From<InterleaveError> for CliError {
    fn from(e: InterleaveError) -> Self {
        match e {
            InterleaveError::MissingCorpus { .. } | InterleaveError::Io(_) => CliError::io(e),
            _ => CliError::validation(e),
        }
    }
}

impl From<AttnError> for CliError {
    fn from(e: AttnError) -> Self {
        match e {
            AttnError::Io(_) | AttnError::SidecarIo { .. } => CliError::io(e),
            _ => CliError::validation(e),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::validation(e)
    }
}

use std::path::Path;

/// Exit status for a verification failure.
pub const EXIT_VERIFY: i32 = 1;
/// Exit status for bad input or usage.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{}parse error at line {line}, column {column}: {msg}", .path.as_deref().map(|p| format!("{p}: ")).unwrap_or_default())]
    Parse {
        path: Option<String>,
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] vcreg_core::Error),
}

impl CliError {
    pub fn parse(path: Option<&Path>, e: &serde_json::Error) -> Self {
        CliError::Parse {
            path: path.map(|p| p.display().to_string()),
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// Constructions that fail their own guarantees count as verification
    /// failures; everything else is the caller's fault.
    pub fn exit_code(&self) -> i32 {
        use vcreg_core::Error as E;
        match self {
            CliError::Core(E::DepthCap { .. } | E::SurrogateInsufficient(_) | E::Internal(_)) => {
                EXIT_VERIFY
            }
            _ => EXIT_INPUT,
        }
    }
}

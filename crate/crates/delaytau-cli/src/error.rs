//! Process-level error handling.
//!
//! Every failure is classified into one of two exit codes: `2` for bad
//! requests (unreadable files, malformed descriptions, flags that do not
//! fit together) and `3` for numerical failures inside an otherwise
//! well-posed computation. The classification of library errors follows
//! [`delaytau::Error::is_configuration`].

use thiserror::Error;

/// Anything that can abort a subcommand.
#[derive(Debug, Error)]
pub enum CliError {
    /// A file could not be read or written.
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// The request itself is malformed (flag combinations, ranges).
    #[error("{0}")]
    Config(String),

    /// The computation failed inside the library.
    #[error(transparent)]
    Lib(#[from] delaytau::Error),
}

impl CliError {
    /// Short machine-readable tag, mirrored into the stderr JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Config(_) => "config",
            CliError::Lib(e) => e.kind(),
        }
    }

    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Config(_) => 2,
            CliError::Lib(e) => {
                if e.is_configuration() {
                    2
                } else {
                    3
                }
            }
        }
    }
}

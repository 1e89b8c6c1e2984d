//! Library side of the `regevo` binary: run configuration and the four
//! pipeline commands. The binary maps [`CliError`] kinds to exit codes
//! (0 success, 1 runtime error, 2 usage or config error).

pub mod commands;
pub mod config;

use std::fmt;

/// Command failure with the exit-code class baked in.
#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration; exit code 2.
    Usage(String),
    /// The run itself failed (I/O, malformed data, engine error); exit
    /// code 1.
    Runtime(String),
}

impl CliError {
    pub fn usage(message: impl fmt::Display) -> Self {
        CliError::Usage(message.to_string())
    }

    pub fn runtime(message: impl fmt::Display) -> Self {
        CliError::Runtime(message.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

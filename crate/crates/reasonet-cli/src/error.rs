//! CLI error carrying the process exit code.

use reasonet_core::Error;

/// Exit code for usage errors (bad flags, missing arguments).
pub const EXIT_USAGE: i32 = 64;
/// Exit code for unparseable input documents.
pub const EXIT_PARSE: i32 = 65;
/// Exit code for inconsistent (unsatisfiable) inputs.
pub const EXIT_INCONSISTENT: i32 = 2;
/// Exit code for internal failures.
pub const EXIT_SOFTWARE: i32 = 70;

/// An error with a message and the exit status to report.
#[derive(Debug)]
pub struct CliError {
    /// Human-readable description.
    pub message: String,
    /// Process exit code.
    pub code: i32,
}

impl CliError {
    /// A usage error (exit 64).
    pub fn usage(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_USAGE }
    }

    /// A parse error (exit 65).
    pub fn parse(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_PARSE }
    }

    /// An inconsistency (exit 2).
    pub fn inconsistent(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: EXIT_INCONSISTENT }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Input(_) => EXIT_PARSE,
            Error::Inconsistency(_) => EXIT_INCONSISTENT,
            _ => EXIT_SOFTWARE,
        };
        Self { message: e.to_string(), code }
    }
}

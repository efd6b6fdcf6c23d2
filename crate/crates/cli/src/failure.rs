use std::fmt;
use std::path::Path;

use ruled_ricci::export::ExportError;
use ruled_ricci::Error;

/// Process exit codes.
pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_IO: u8 = 4;

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_VALIDATION, message: message.into() }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure { code: EXIT_IO, message: format!("{}: {err}", path.display()) }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn kernel_code(e: &Error) -> u8 {
    match e {
        Error::NonFinite(_)
        | Error::VanishingSpeed { .. }
        | Error::NonRegular { .. }
        | Error::Degenerate { .. }
        | Error::Eval(_) => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: kernel_code(&e), message: e.to_string() }
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Geometry(g) => g.into(),
            ExportError::Io { path, source } => Failure::io(&path, source),
        }
    }
}

pub type CliResult<T = u8> = Result<T, Failure>;

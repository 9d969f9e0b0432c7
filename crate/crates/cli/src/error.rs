use deltashock::model::ModelError;
use serde_json::json;
use std::fmt;

/// Process exit codes. Part of the command-line contract.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const VALIDATION: i32 = 2;
    pub const VERIFICATION: i32 = 3;
    pub const UNSUPPORTED_ORACLE: i32 = 4;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub exit_code: i32,
    /// Stable machine-readable tag, e.g. `NoDeltaShock`.
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn new(exit_code: i32, code: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            exit_code,
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn validation(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(exit::VALIDATION, code, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(exit::FAILURE, "Io", message)
    }

    /// One-line JSON for standard error.
    pub fn to_json(&self, scenario: &str) -> String {
        json!({ "error": self.code, "message": self.message, "scenario": scenario }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::validation(e.code(), e.to_string())
    }
}

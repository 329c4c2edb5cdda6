use std::fmt;
use std::path::Path;

use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    Schema(String),
    /// A computation failed; `diagnostics` says where.
    Numerical { message: String, diagnostics: Value },
    Io { path: String, message: String },
}

impl CliError {
    pub fn numerical(stage: &str, err: impl fmt::Display) -> Self {
        Self::Numerical {
            message: err.to_string(),
            diagnostics: json!({ "stage": stage }),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn status(&self) -> i32 {
        match self {
            Self::Schema(_) => 2,
            Self::Numerical { .. } => 3,
            Self::Io { .. } => 4,
        }
    }

    /// The machine-readable record written to stderr.
    pub fn record(&self) -> Value {
        let body = match self {
            Self::Schema(m) => json!({ "kind": "schema", "message": m }),
            Self::Numerical { message, diagnostics } => {
                json!({ "kind": "numerical", "message": message, "diagnostics": diagnostics })
            }
            Self::Io { path, message } => json!({ "kind": "io", "path": path, "message": message }),
        };
        json!({ "error": body, "status": self.status() })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Schema(m) => write!(f, "config error: {m}"),
            Self::Numerical { message, .. } => write!(f, "numerical failure: {message}"),
            Self::Io { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

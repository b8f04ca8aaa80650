//! Command errors, rendered as machine-readable JSON objects.

use qjunta::Error as LibError;

/// Anything a subcommand can fail with; `to_json` is the wire format
/// printed to stderr before a nonzero exit.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] LibError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    InvalidArgument(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, err: std::io::Error) -> CliError {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// Stable kebab-case tag so scripts can branch on failures without
    /// parsing prose.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Lib(e) => match e {
                LibError::DimensionMismatch(_) => "dimension-mismatch",
                LibError::NotUnitary { .. } => "not-unitary",
                LibError::QubitOutOfRange { .. } => "qubit-out-of-range",
                LibError::DenseCapExceeded { .. } => "dense-cap-exceeded",
                LibError::PrepFailed(_) => "prep-failed",
                LibError::InsufficientCopies { .. } => "insufficient-copies",
                LibError::BackendUnsupported { .. } => "backend-unsupported",
                LibError::SupportExceedsPromise { .. } => "support-exceeds-promise",
                LibError::InvalidInstance(_) => "invalid-instance",
                LibError::InvalidParameter(_) => "invalid-parameter",
            },
            CliError::Io { .. } => "io",
            CliError::InvalidArgument(_) => "invalid-argument",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() }
        })
        .to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_objects_carry_kind_and_message() {
        let e = CliError::InvalidArgument("bad --kind".into());
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"]["kind"], "invalid-argument");
        assert_eq!(v["error"]["message"], "bad --kind");

        let e = CliError::Lib(LibError::DenseCapExceeded {
            requested: 9,
            cap: 8,
        });
        assert_eq!(e.kind(), "dense-cap-exceeded");
    }
}

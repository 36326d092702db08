use parasqueeze_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Numerical(CoreError),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    /// Bad inputs are configuration errors; everything else is numerical.
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Domain(_) | CoreError::Parse(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(CoreError::Domain("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::Parse("x".into())).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::Precision("x".into())).exit_code(), 3);
        let trunc = CoreError::Truncation { tail: 1e-3, limit: 1e-6 };
        assert_eq!(CliError::from(trunc).exit_code(), 3);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(CliError::io("f", io).exit_code(), 4);
    }
}

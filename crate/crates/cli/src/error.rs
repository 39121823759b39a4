//! CLI-level error type mapping every failure onto one of three exit codes:
//! 1 for configuration problems, 2 for data problems, 3 for numeric
//! failures. Library errors are classified by variant and prefixed with the
//! pipeline stage that raised them.

use std::fmt;

use picast::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Config,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Data,
            message: message.into(),
        }
    }

    /// Wraps a library error raised while checking configuration values;
    /// whatever the variant, the user's fix is in the config file.
    pub fn from_config_stage(err: Error) -> Self {
        CliError::config(err.to_string())
    }

    /// Classifies a library error raised by the named pipeline stage.
    pub fn stage(stage: &str, err: Error) -> Self {
        let kind = match &err {
            Error::InvalidParameter { .. } | Error::SplitTooLarge { .. } => ErrorKind::Config,
            Error::Io(_)
            | Error::MalformedRow { .. }
            | Error::NonMonotoneTimestamp { .. }
            | Error::NegativeVolume { .. }
            | Error::SeriesTooShort { .. }
            | Error::EmptyForecast
            | Error::BoundOrder { .. }
            | Error::Serialization(_) => ErrorKind::Data,
            Error::NonFinite(_)
            | Error::NoArCandidate
            | Error::NoConvergence { .. }
            | Error::DimensionMismatch { .. } => ErrorKind::Numeric,
        };
        CliError {
            kind,
            message: format!("{stage}: {err}"),
        }
    }

    /// Process exit code: 1 config, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Config => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numeric => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ErrorKind::Config => "config error",
            ErrorKind::Data => "data error",
            ErrorKind::Numeric => "numeric error",
        };
        write!(f, "{kind}: {}", self.message)
    }
}

impl std::error::Error for CliError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_kind() {
        assert_eq!(CliError::config("x").exit_code(), 1);
        assert_eq!(CliError::data("x").exit_code(), 2);
        assert_eq!(CliError::stage("tuning", Error::NoArCandidate).exit_code(), 3);
    }

    #[test]
    fn stage_classification_covers_the_three_kinds() {
        let e = CliError::stage(
            "windowing",
            Error::InvalidParameter {
                what: "lag".into(),
                why: "zero".into(),
            },
        );
        assert_eq!(e.kind, ErrorKind::Config);
        assert!(e.to_string().contains("windowing"));

        let e = CliError::stage("loading", Error::EmptyForecast);
        assert_eq!(e.kind, ErrorKind::Data);

        let e = CliError::stage("tuning", Error::NonFinite("beta"));
        assert_eq!(e.kind, ErrorKind::Numeric);
        assert_eq!(e.exit_code(), 3);
    }
}

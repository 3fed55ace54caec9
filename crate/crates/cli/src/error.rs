use std::fmt;

use ramsey_core::Error as CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Validation,
    Numerical,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Validation,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            kind: Kind::Numerical,
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Validation => 1,
            Kind::Numerical => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let numerical = matches!(
            e,
            CoreError::StepLimit { .. }
                | CoreError::FringeNotBracketed
                | CoreError::NoFringe { .. }
                | CoreError::Pole { .. }
                | CoreError::NoSignChange { .. }
        );
        if numerical {
            Self::numerical(e.to_string())
        } else {
            Self::validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::validation(format!("i/o error: {e}"))
    }
}

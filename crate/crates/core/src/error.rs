use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or config value is out of its admissible range.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// An array does not have the length the grid requires.
    #[error("`{what}` has length {found}, expected {expected}")]
    Shape {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    /// A field picked up a NaN or infinity during time stepping.
    #[error("non-finite value in `{field}` during step {step} ({stage})")]
    Instability {
        step: u64,
        field: &'static str,
        stage: &'static str,
    },

    #[error("case file: {0}")]
    Config(String),

    #[error("material table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

/// Returns a shape error unless `found == expected`.
pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Shape {
            what,
            expected,
            found,
        })
    }
}

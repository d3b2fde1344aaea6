use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the memory library and its I/O layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operands do not share the shape an operation requires.
    #[error("dimension mismatch: {context}")]
    Dimension { context: String },

    /// A value level lies outside a table's row range.
    #[error("value {value} out of range for {levels} levels")]
    Range { value: usize, levels: usize },

    /// The quantizer could not be calibrated.
    #[error("calibration error: {reason}")]
    Calibration { reason: String },

    /// A total function was required but an argument has no value.
    #[error("partial function: argument {arg} is undefined")]
    Partial { arg: usize },

    /// A label did not route to exactly one memory register.
    #[error("label {label} matches {count} registers, expected exactly one")]
    Routing { label: u8, count: usize },

    /// A feature entry was NaN or infinite.
    #[error("non-finite feature value at index {index}")]
    NonFinite { index: usize },

    /// An image does not fit the extractor's padded frame.
    #[error("image {width}x{height} exceeds pad {pad}")]
    ImageTooLarge {
        width: usize,
        height: usize,
        pad: usize,
    },

    /// A text input could not be parsed; `line` is 1-based, 0 for whole-file problems.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    /// A binary input violates its format.
    #[error("format error in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// The operation is not available for the given configuration.
    #[error("unsupported: {reason}")]
    Unsupported { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dimension(context: impl Into<String>) -> Self {
        Error::Dimension {
            context: context.into(),
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

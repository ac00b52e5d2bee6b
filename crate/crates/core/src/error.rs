use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("patch at ({row}, {col}) does not fit in a {rows}x{cols} image")]
    PatchOutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("pixel ({row}, {col}) is not covered by any patch")]
    UncoveredPixel { row: usize, col: usize },

    #[error("image is {rows}x{cols}, needs at least {min}x{min}")]
    ImageTooSmall { rows: usize, cols: usize, min: usize },

    #[error("non-finite intermediate result at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error("quality factor {0} outside 1..=100")]
    QualityOutOfRange(u32),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

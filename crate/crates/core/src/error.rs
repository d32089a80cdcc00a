use alloc::string::String;

/// Errors raised by the reconstruction core.
///
/// Variants are split into input problems (bad lengths, bad index sets,
/// out-of-range parameters) and numerical failures (divergence,
/// ill-conditioning, non-real results). Front ends map the two groups to
/// different exit codes via [`Error::is_numerical`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("signal length {0} is too short (need at least 2 samples)")]
    TooShort(usize),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("sample set has no available samples")]
    NoAvailableSamples,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("interpolation kernel requires an even length, got {0}")]
    OddLength(usize),

    #[error("all available samples are zero; initial step would be zero")]
    ZeroInitialStep,

    #[error("signal has zero energy")]
    ZeroEnergy,

    #[error("cannot place {requested} distinct non-colliding frequencies in length {len}")]
    FrequencyPlacement { requested: usize, len: usize },

    #[error("imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    ImaginaryResidue { residue: f64, tolerance: f64 },

    #[error("reconstruction diverged at iteration {iteration}")]
    Diverged { iteration: usize },

    #[error(
        "interpolation matrix is ill-conditioned (estimate {estimate:e}); instants nearly coincide"
    )]
    IllConditioned { estimate: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("problem too large for exhaustive search: length {len} exceeds {max}")]
    TooLarge { len: usize, max: usize },

    #[error("sampling instants invalid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// `true` for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Diverged { .. }
                | Error::IllConditioned { .. }
                | Error::Singular
                | Error::ImaginaryResidue { .. }
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

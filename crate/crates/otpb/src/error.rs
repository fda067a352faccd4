use std::io;
use thiserror::Error;

/// Decoding failures for the framed wire format.
///
/// Each variant names the field or check that failed so that a transcript
/// of a bad session pinpoints the first offending byte.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    /// Buffer ended before `field` could be read in full.
    #[error("truncated frame: field `{field}` needs {needed} bytes, only {available} available")]
    Truncated {
        field: &'static str,
        needed: usize,
        available: usize,
    },
    /// The type byte is not one of the assigned frame types.
    #[error("unknown frame type byte 0x{0:02x}")]
    UnknownType(u8),
    /// Header-declared payload length disagrees with the bytes present.
    #[error("frame length mismatch: header declares {declared} payload bytes, {actual} present")]
    LengthMismatch { declared: usize, actual: usize },
    /// A phase-block payload must be a whole number of 64-bit samples.
    #[error("phase payload of {len} bytes is not a whole number of 64-bit samples")]
    PhasePayload { len: usize },
    /// A serialized bit block's padding or length header is inconsistent.
    #[error("bit block malformed: {0}")]
    BitBlock(&'static str),
}

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the supported domain.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A sequence had the wrong length for the operation.
    #[error("{what}: expected length {expected}, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A hashing round would not leave even one net key bit after the
    /// next round's basis schedule is re-seeded.
    #[error(
        "pool starvation: round output of {out_bits} bits cannot cover {bases_bits} basis bits \
         plus at least one key bit (short by {shortfall})"
    )]
    PoolStarvation {
        out_bits: i64,
        bases_bits: i64,
        shortfall: i64,
    },

    /// Adaptive quadrature hit its depth limit before reaching the
    /// requested tolerance.
    #[error("quadrature did not converge: error estimate {achieved:.3e} exceeds {requested:.3e}")]
    QuadratureFailure { achieved: f64, requested: f64 },

    /// A tangent-extremum denominator sits inside the pole guard band.
    #[error(
        "tangent pole on the {branch} branch: denominator {denominator:.6e} is within {limit:.0e} of zero"
    )]
    TanPole {
        branch: &'static str,
        denominator: f64,
        limit: f64,
    },

    /// Frame-level decode failure.
    #[error(transparent)]
    Frame(#[from] FrameError),

    /// The peer violated the round protocol (bad type, stale run index,
    /// tag mismatch, explicit abort).
    #[error("protocol violation in {context}: {reason}")]
    Protocol { context: &'static str, reason: String },

    /// The underlying channel failed to move bytes.
    #[error("transport failure: {0}")]
    Transport(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    ///
    /// 2 = bad experiment spec or parameters, 3 = numerical failure,
    /// 4 = file-system failure. Success is 0.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 4,
            Error::QuadratureFailure { .. } | Error::TanPole { .. } => 3,
            _ => 2,
        }
    }
}

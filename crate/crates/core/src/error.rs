use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    InvalidParameter { name: &'static str, reason: String },
    /// A coefficient vector contained NaN or an infinity.
    NonFiniteInput,
    /// The quadrature failed the orthonormality check.
    GramCheck { max_deviation: f64, n_quad: usize },
    /// Rejection sampling gave up after too many consecutive rejections.
    RejectionLimit { attempts: u64 },
    /// Time stepping produced a non-finite state.
    NonFinite { time: f64, stream_id: Option<u64> },
    /// The Duhamel fixed-point iteration did not contract.
    PicardDiverged { iterations: usize, residual: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Attach the ensemble member that produced the failure.
    pub fn with_stream(self, id: u64) -> Self {
        match self {
            Error::NonFinite { time, .. } => Error::NonFinite {
                time,
                stream_id: Some(id),
            },
            other => other,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::NonFiniteInput => write!(f, "coefficients must be finite"),
            Error::GramCheck { max_deviation, n_quad } => write!(
                f,
                "quadrature of order {n_quad} is not orthonormal to tolerance (max deviation {max_deviation:e}); increase n_quad"
            ),
            Error::RejectionLimit { attempts } => {
                write!(f, "rejection sampler gave up after {attempts} consecutive rejections")
            }
            Error::NonFinite { time, stream_id: Some(id) } => {
                write!(f, "non-finite state at t = {time} in stream {id}; reduce dt")
            }
            Error::NonFinite { time, stream_id: None } => {
                write!(f, "non-finite state at t = {time}; reduce dt")
            }
            Error::PicardDiverged { iterations, residual } => write!(
                f,
                "Duhamel iteration failed to converge after {iterations} iterations (residual {residual:e}); shorten the time horizon"
            ),
        }
    }
}

impl core::error::Error for Error {}

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("map has a pole at z = {z}")]
    PoleOfMap { z: Complex64 },

    #[error("matrix is not invertible (determinant {det})")]
    Singular { det: f64 },

    #[error("invalid Schottky data: {}", failures.join("; "))]
    InvalidSchottky { failures: Vec<String> },

    #[error("word {word} is not admissible")]
    InadmissibleWord { word: String },

    #[error("word set is not a partition: {reason}")]
    NotAPartition { reason: String },

    #[error("derivative {value} crosses the branch cut of the logarithm")]
    BranchTracking { value: Complex64 },

    #[error("interpolation residual {residual:e} exceeds {tolerance:e}; increase the node count")]
    UnderResolved { residual: f64, tolerance: f64 },

    #[error("winding number along the box boundary did not stabilise ({detail})")]
    WindingUnstable { detail: String },

    #[error("Newton iteration from {start} did not converge after {iterations} steps")]
    NewtonDiverged { start: Complex64, iterations: usize },

    #[error("Perron eigenvalue not bracketed: lambda(0) = {at_zero}, lambda(1) = {at_one}")]
    NotBracketed { at_zero: f64, at_one: f64 },

    #[error("{what} did not converge (last change {last_change:e})")]
    NotConverged {
        what: &'static str,
        last_change: f64,
    },

    #[error("s = {s} is not a zero: smallest singular value {sigma_min:e}")]
    NotAZero { s: Complex64, sigma_min: f64 },

    #[error("kernel singularity on the diagonal is not guarded: {reason}")]
    UnguardedDiagonal { reason: String },

    #[error("grid with {n} points is too coarse for h = {h} (N*h = {product} < 20)")]
    GridTooCoarse { n: usize, h: f64, product: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of an iterative numerical method, as opposed to bad
    /// inputs. The command-line front end maps these to exit status 2.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::WindingUnstable { .. }
                | Error::NewtonDiverged { .. }
                | Error::NotConverged { .. }
                | Error::NotBracketed { .. }
                | Error::UnderResolved { .. }
                | Error::Singular { .. }
                | Error::BranchTracking { .. }
                | Error::NotAZero { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

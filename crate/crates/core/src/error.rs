//! Error type shared across the crate.

use core::fmt;

use crate::mesh::MziAddress;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by construction and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Matrix failed the unitarity check `‖U†U − I‖_max ≤ 1e-10`.
    NotUnitary { defect: f64 },
    /// State amplitudes are not normalised to 1 within tolerance.
    NotNormalized { norm_sq: f64 },
    /// A size cap was exceeded (Fock basis, permanent order, cutoff, ...).
    Capacity { what: &'static str },
    /// Mesh settings are missing a required MZI.
    MissingMzi(MziAddress),
    /// The (row, column) pair does not name a valid grid element.
    InvalidAddress { row: usize, col: usize },
    /// The address exists but the operation cannot run there
    /// (e.g. a meta-MZI target on the grid boundary).
    UnsupportedAddress(MziAddress),
    /// Two addresses were required to be distinct.
    IdenticalAddresses,
    /// Operands disagree on dimensions.
    DimensionMismatch(&'static str),
    /// States are defined over different Fock bases.
    BasisMismatch,
    /// A scalar argument fell outside its documented domain.
    Parameter(&'static str),
    /// Least-squares design matrix is rank deficient.
    FitDegenerate,
    /// The dual solver did not reach the KKT tolerance within its
    /// iteration cap; carries the remaining violation.
    SolverDiverged { residual: f64 },
    /// A kernel row is missing the entry for a support vector.
    MissingKernelEntry(usize),
    /// An input collection was empty where at least one element is needed.
    EmptyInput(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotUnitary { defect } => {
                write!(f, "matrix is not unitary (defect {defect:.3e})")
            }
            Error::NotNormalized { norm_sq } => {
                write!(f, "state is not normalised (|amplitudes|^2 sums to {norm_sq})")
            }
            Error::Capacity { what } => write!(f, "capacity exceeded: {what}"),
            Error::MissingMzi(addr) => write!(f, "mesh settings missing MZI {addr}"),
            Error::InvalidAddress { row, col } => {
                write!(f, "({row},{col}) is not a valid grid address")
            }
            Error::UnsupportedAddress(addr) => {
                write!(f, "operation not supported at {addr}")
            }
            Error::IdenticalAddresses => write!(f, "addresses must be distinct"),
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::BasisMismatch => write!(f, "states live on different Fock bases"),
            Error::Parameter(what) => write!(f, "parameter out of range: {what}"),
            Error::FitDegenerate => write!(f, "fit design matrix is rank deficient"),
            Error::SolverDiverged { residual } => {
                write!(f, "solver did not converge (KKT violation {residual:.3e})")
            }
            Error::MissingKernelEntry(i) => {
                write!(f, "kernel row is missing entry for support vector {i}")
            }
            Error::EmptyInput(what) => write!(f, "empty input: {what}"),
        }
    }
}

impl core::error::Error for Error {}

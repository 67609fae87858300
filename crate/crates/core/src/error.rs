use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NonHermitian(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("system is metallic: minimum gap {0:e} below tolerance")]
    MetallicSystem(f64),
    #[error("(d_z, d_x) path passes within {0:e} of the origin")]
    PathThroughOrigin(f64),
    #[error("closed form requires the flat-band limit m = 0, phi = +-pi")]
    FlatBandRequired,
    #[error("closed form requires a bulk rung (1 < j < L), got j = {0}")]
    BulkOnly(usize),
    #[error("closed form requires m = 0 (rungs present)")]
    RungsPresent,
    #[error("closed form requires open boundary conditions")]
    OpenBoundaryRequired,
    #[error("no occupation minimum found in the trajectory")]
    NoMinimumFound,
    #[error("no state inside the bulk gap")]
    NoMidgapState,
    #[error("exchange symmetry violated (max |lambda_ab - lambda_ba| = {0:e})")]
    SymmetryViolation(f64),
    #[error("eigendecomposition failed to converge")]
    EigenFailure,
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { field, reason: reason.into() }
    }

    /// True for errors caused by the physics of the requested point rather than
    /// malformed input (metallic system, path through the origin, missing edge mode...).
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::InvalidParameter { .. } | Error::DimensionMismatch { .. } | Error::NotNormalized(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

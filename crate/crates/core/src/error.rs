//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the geometric kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands live in spaces of different dimensions.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A matrix expected to be skew-symmetric is not.
    #[error("matrix is not skew-symmetric (max deviation {0:e})")]
    NotSkew(f64),

    /// An endomorphism fails the f-structure identity or has the wrong rank.
    #[error("not an f-structure: {0}")]
    NotFStructure(String),

    /// A pair (phi, xi) fails the almost-contact identities.
    #[error("not an almost contact structure: {0}")]
    NotAlmostContact(String),

    /// A vertical vector fails the fiber tangency condition.
    #[error("endomorphism is not tangent to the fiber (residual {0:e})")]
    NotTangent(f64),

    /// Structures of this kind need an odd dimension >= 3.
    #[error("dimension must be odd and >= 3, got {0}")]
    EvenDimension(usize),

    /// Rank parameter out of the admissible range 0 < 2k <= n.
    #[error("rank parameter k={k} out of range for dimension n={n}")]
    RankOutOfRange { n: usize, k: usize },

    /// A frame passed where an orthonormal one is required.
    #[error("frame is not orthonormal (max deviation {0:e})")]
    FrameNotOrthonormal(f64),

    /// Linearly dependent input to orthonormalization.
    #[error("degenerate frame: vector {index} has projection residual {residual:e}")]
    DegenerateFrame { index: usize, residual: f64 },

    /// Point outside the chart domain (or too close to its boundary).
    #[error("point outside chart domain `{label}` (required margin {margin:e})")]
    OutOfDomain { label: String, margin: f64 },

    /// Chart metric is not positive definite at the evaluation point.
    #[error("chart metric not positive definite at evaluation point ({label})")]
    NonPositiveDefinite { label: String },

    /// Curvature data lacks nabla-R and the base is not flagged locally symmetric.
    #[error("nabla R missing: curvature data is not flagged locally symmetric")]
    MissingNablaR,

    /// The eta-Einstein fit received an unusable sample set.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Invalid run parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

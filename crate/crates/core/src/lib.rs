//! Numerical differential geometry for the twistor space of an odd-dimensional
//! Riemannian manifold.
//!
//! The crate builds, for a base manifold given as a coordinate chart:
//!
//! * the pointwise fiber geometry of compatible f-structures and almost
//!   contact metric structures ([`contact`]),
//! * chart-based curvature by finite differences — Christoffel symbols,
//!   the curvature operator on two-vectors, Ricci, and its covariant
//!   derivative ([`geometry`]),
//! * the twistor-space metrics `h_t`, their contact data and their Ricci
//!   tensor, both in closed form and through an independent unit-tangent-
//!   bundle oracle chart ([`twistor`]),
//! * least-squares fitting and diagnostics for the eta-Einstein condition
//!   `Ricci = a·h_t + b·eta⊗eta` ([`eta_einstein`]).
//!
//! All numerical kernels are generic over the scalar type through
//! [`Real`]; `f64` aliases for the main types live at the crate root.

pub mod contact;
pub mod error;
pub mod eta_einstein;
pub mod fiber;
pub mod geometry;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod twistor;

pub use error::{Error, Result};
pub use scalar::Real;

/// Skew-symmetric endomorphism over `f64`.
pub type SkewEndo64 = linalg::SkewEndo<f64>;
/// Two-vector over `f64`.
pub type TwoVector64 = linalg::TwoVector<f64>;
/// f-structure over `f64`.
pub type FStructure64 = contact::FStructure<f64>;
/// Almost contact metric structure over `f64`.
pub type AlmostContact64 = contact::AlmostContactStructure<f64>;
/// Coordinate-chart metric over `f64`.
pub type ChartMetric64 = geometry::ChartMetric<f64>;
/// Curvature data bundle over `f64`.
pub type CurvatureData64 = geometry::CurvatureData<f64>;
/// Twistor tangent vector over `f64`.
pub type TwistorTangent64 = twistor::TwistorTangent<f64>;
/// Sasaki-metric oracle over `f64`.
pub type SasakiOracle64 = twistor::SasakiOracle<f64>;

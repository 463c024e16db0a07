//! Scalar abstraction shared by every numerical kernel.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable in all geometric computations: `f32` or `f64`.
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {}

impl<T> Real for T where T: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<S: Real>(x: f64) -> S {
    S::from_f64(x).expect("constant not representable in scalar type")
}

/// Converts a scalar back to `f64` (for reports and serialization).
#[inline]
pub fn to_f64<S: Real>(x: S) -> f64 {
    x.to_f64().expect("scalar not representable as f64")
}

/// Default tolerance for exact-algebra identities at double precision.
#[inline]
pub fn default_tol<S: Real>() -> S {
    real(1e-10)
}

#[inline]
pub(crate) fn smax<S: Real>(a: S, b: S) -> S {
    if a > b {
        a
    } else {
        b
    }
}

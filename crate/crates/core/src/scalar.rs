//! Floating point scalar abstraction.
//!
//! Every numerical routine in the crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. Tolerances that the checks compare against
//! are expressed per type so the same code path can run in single precision
//! with looser gates.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar usable by the field and algebra kernels.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance used where a residual must vanish up to roundoff
    /// (1e-12 in double precision).
    const ROUNDOFF_TOL: f64;

    /// Converts a literal. Never fails for finite inputs on the implemented types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in a float")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn roundoff_tol() -> Self {
        Self::lit(Self::ROUNDOFF_TOL)
    }
}

impl Scalar for f64 {
    const ROUNDOFF_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const ROUNDOFF_TOL: f64 = 1e-5;
}

/// `(-1)^k` as a scalar.
#[inline]
pub fn parity_sign<S: Scalar>(k: usize) -> S {
    if k % 2 == 0 {
        S::one()
    } else {
        -S::one()
    }
}

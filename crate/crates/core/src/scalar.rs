//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Relative threshold below which a column is treated as linearly dependent
    /// on the columns already factored.
    const RANK_TOL: f64;

    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which never happens for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn rank_tol() -> Self {
        Self::lit(Self::RANK_TOL)
    }
}

impl Real for f64 {
    const RANK_TOL: f64 = 1e-12;
}

impl Real for f32 {
    // 1e-12 is far below f32 epsilon; scale to the type's precision instead.
    const RANK_TOL: f64 = 1e-6;
}

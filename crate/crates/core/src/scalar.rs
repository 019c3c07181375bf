//! Scalar abstraction for the dense linear-algebra kernels.
//!
//! Everything in [`crate::quantum`] and [`crate::bounds`] is written against
//! [`Real`], so the same code runs in `f32` or `f64`. The sampling and
//! integration layers above it are concrete `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Convert a literal. Panics only if the literal is not representable,
    /// which never happens for the constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Smallest tolerance that still makes sense at this precision for a
    /// quantity of magnitude `scale`.
    #[inline]
    fn noise_floor(scale: Self) -> Self {
        Self::lit(64.0) * Self::epsilon() * scale.max(Self::one())
    }

    /// `max(tol, noise_floor(scale))`: a configured tolerance that degrades
    /// gracefully for single precision.
    #[inline]
    fn tol(tol: f64, scale: Self) -> Self {
        Self::lit(tol).max(Self::noise_floor(scale))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

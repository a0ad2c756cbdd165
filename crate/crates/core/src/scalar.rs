//! Scalar abstractions.
//!
//! Geometry, meshing and the eigensolver are generic over [`Real`] (`f32` or
//! `f64`). Orbifold bookkeeping uses exact rationals.

use nalgebra as na;
use num_traits as nt;

/// Floating point scalar usable throughout the numerical pipeline.
pub trait Real:
    Copy + na::RealField + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive + Send + Sync
{
    /// Converts a literal. Panics only for values unrepresentable in `Self`.
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("representable literal")
    }

    fn as_f64(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).expect("finite scalar")
    }

    /// Unit roundoff.
    fn eps() -> Self;
}

impl Real for f32 {
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// Exact rational number used for Euler characteristics and coefficients.
pub type Rational = num_rational::Ratio<i64>;

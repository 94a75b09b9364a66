//! Scalar abstraction shared by every model in the crate.

use nalgebra as na;
use num_traits as nt;

/// Floating point types the Gaussian and spectral models are written against.
///
/// Implemented for `f32` and `f64`. Tolerances that are meaningful only in
/// double precision are scaled through [`Real::tolerance`].
pub trait Real:
    na::RealField + nt::FromPrimitive + nt::ToPrimitive + nt::FloatConst + Copy + Send + Sync
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion back to `f64`, used for reports and error payloads.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        nt::ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// A tolerance that is `target` in double precision and widened to a
    /// fixed multiple of machine epsilon for narrower types.
    #[inline]
    fn tolerance(target: f64) -> Self {
        let floor = Self::default_epsilon() * Self::lit(1.0e4);
        let target = Self::lit(target);
        if floor > target {
            floor
        } else {
            target
        }
    }

    #[inline]
    fn is_finite_value(self) -> bool {
        let x = self.to_f64_lossy();
        x.is_finite()
    }
}

impl Real for f32 {}
impl Real for f64 {}

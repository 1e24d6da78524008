//! Scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Never fails for the float types we implement.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float converts to f64")
    }

    /// A requested relative tolerance, floored at a small multiple of machine
    /// epsilon so that f32 callers still get an attainable target.
    #[inline]
    fn tolerance(requested: f64) -> Self {
        Self::lit(requested).max(Self::epsilon() * Self::lit(16.0))
    }

    /// Largest coefficient magnitude the series engine accepts.
    #[inline]
    fn overflow_threshold() -> Self {
        Self::lit(1e250).min(Self::max_value() / Self::lit(1e8))
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floors_at_epsilon() {
        assert_eq!(f64::tolerance(1e-12), 1e-12);
        assert!(f32::tolerance(1e-12) > 1e-7);
    }

    #[test]
    fn overflow_threshold_is_finite() {
        assert_eq!(f64::overflow_threshold(), 1e250);
        assert!(f32::overflow_threshold().is_finite());
    }
}

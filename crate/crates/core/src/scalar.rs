//! Scalar abstraction for the numerical core.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point scalar the simulation core is generic over.
///
/// Precision-dependent thresholds are associated functions so that `f32`
/// code paths do not inherit cut-offs that only make sense in `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Below this `|sin φ_r|` the quotient form of `α` is replaced by its limit.
    fn removable_tol() -> Self;
    /// Relative eigenvalue gap treated as a coalescence.
    fn degenerate_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values unrepresentable in `Self`,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }
}

macro_rules! impl_real {
    ($t:ty, $removable:expr, $degenerate:expr) => {
        impl Real for $t {
            #[inline]
            fn removable_tol() -> Self {
                $removable
            }
            #[inline]
            fn degenerate_tol() -> Self {
                $degenerate
            }
        }
    };
}

impl_real!(f64, 1e-8, 1e-14);
impl_real!(f32, 1e-4, 1e-6);

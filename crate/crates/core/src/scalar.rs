//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used for logarithmic sums, moments and predictors.
///
/// Implemented for `f32` and `f64`. Integer bookkeeping (primes, exponents,
/// floor quotients) stays in `u64` regardless of the scalar.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to every Real")
    }

    fn from_count(x: u64) -> Self {
        Self::from_u64(x).expect("u64 converts to every Real")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `(1 - delta)^q` computed as `exp(q * ln(1 - delta))`.
pub(crate) fn miss_power<R: Real>(log_keep: R, q: u64) -> R {
    if q == 0 {
        return R::one();
    }
    (R::from_count(q) * log_keep).exp()
}

/// `1 - (1 - delta)^q` without cancellation for small `delta`.
pub(crate) fn hit_probability<R: Real>(log_keep: R, q: u64) -> R {
    if q == 0 {
        return R::zero();
    }
    -(R::from_count(q) * log_keep).exp_m1()
}

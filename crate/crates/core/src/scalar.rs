//! Scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar usable for probabilities, divergences and exponents.
///
/// Tolerances are per type: `f32` cannot hold a probability vector's sum to
/// within `1e-9`, so each implementation carries its own.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Allowed deviation of a probability vector's sum from one.
    fn sum_tolerance() -> Self;

    /// Interval width at which the Chernoff line search stops.
    fn solver_tolerance() -> Self;

    /// Lossy conversion from `f64`, for constants and externally supplied values.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("f64 converts to every Real")
    }

    fn of_count(value: u64) -> Self {
        Self::from_u64(value).expect("u64 converts to every Real")
    }
}

impl Real for f64 {
    fn sum_tolerance() -> Self {
        1e-9
    }

    fn solver_tolerance() -> Self {
        1e-10
    }
}

impl Real for f32 {
    fn sum_tolerance() -> Self {
        1e-5
    }

    fn solver_tolerance() -> Self {
        1e-6
    }
}

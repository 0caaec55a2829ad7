use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar used by the geometry, kinematics and planning stack.
///
/// Everything numeric in this crate is generic over `Scalar`; the shipped
/// pipeline instantiates it with [`f64`](crate::Real).
pub trait Scalar:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant or file value into this scalar type.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 must convert to scalar")
    }

    /// Widens to `f64` for statistics, timing records and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_f64() {
        assert_eq!(f64::of(1.25), 1.25);
        assert_eq!(f32::of(1.25), 1.25f32);
        assert_eq!(1.25f32.as_f64(), 1.25);
    }
}

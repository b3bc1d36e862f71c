//! Floating-point scalar abstraction the numeric core is generic over.

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar type for datasets, models, metrics, and attributions.
///
/// Implemented for `f32` and `f64`. `f64` is the default type parameter of
/// every generic type in this crate, and the crate root exports `*64`
/// aliases for the flagship types.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + std::iter::Sum + std::fmt::Debug + Send + Sync + 'static
{
    /// Converts a finite `f64` into this scalar type.
    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts into every supported scalar")
    }

    /// Widens to `f64` for formatting and reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("every supported scalar widens to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

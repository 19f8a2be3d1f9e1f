//! Scalar abstraction shared by the certainty-factor algebra and the
//! calculators.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real-valued scalar the numeric procedures are generic over.
///
/// Implemented for `f32` and `f64`. The engine and the knowledge-base
/// language use `f64` (see the aliases at the crate root).
pub trait Scalar: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts a literal constant; every constant used by this crate is
    /// representable in `f32`.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("constant representable in scalar type")
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {}

//! Scalar abstraction shared by the metric, readability and statistics code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable by every numeric routine in the crate.
///
/// Implemented for `f32` and `f64`. Counts enter through [`Real::from_count`],
/// so integer statistics never round-trip through a narrower type.
pub trait Real: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable as float")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static {}

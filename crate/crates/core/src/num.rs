//! Scalar abstraction for path costs.
//!
//! Everything that carries a cost (portal traversal, edge weights, path
//! totals, heuristics) is generic over [`Scalar`], so the planner runs on
//! `f32` for compact maps or `f64` when costs are compared at 1e-9.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts a grid distance (cell count) into a cost.
    #[inline]
    fn from_steps(n: usize) -> Self {
        Self::from_usize(n).expect("step count representable as float")
    }

    /// Lossy conversion used at serialization boundaries.
    #[inline]
    fn lossy_from_f64(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Total order over non-NaN scalars. NaN sorts last, which never happens for
/// validated maps since portal costs are required to be finite.
#[inline]
pub(crate) fn total_cmp<S: Scalar>(a: S, b: S) -> std::cmp::Ordering {
    a.partial_cmp(&b)
        .unwrap_or_else(|| a.is_nan().cmp(&b.is_nan()))
}

//! Scalar abstraction shared by every geometric routine.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar the geometry pipeline is generic over (`f32` or `f64`).
///
/// Tolerances are stored as `f64` constants and converted on use, so `f32`
/// instantiations work but cannot reach the tightest thresholds.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion from a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numerical tolerances used across the crate.
pub mod tol {
    /// Smallest admissible edge length.
    pub const LENGTH: f64 = 1e-12;
    /// Allowed deviation of a face's angle sum from pi.
    pub const ANGLE_SUM: f64 = 1e-10;
    /// Gauss-Bonnet check on totals.
    pub const GAUSS_BONNET: f64 = 1e-9;
    /// Relative band for circle intersections during layout.
    pub const LAYOUT: f64 = 1e-9;
    /// Conjugate gradient relative residual.
    pub const CG: f64 = 1e-12;
    /// Allowed drift of probability mass from one.
    pub const PROBABILITY_SUM: f64 = 1e-9;
}

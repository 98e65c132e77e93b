//! Floating-point abstraction shared by every solver module.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar the solvers are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts a literal. Every `f64` constant used by the solvers is
    /// representable (possibly rounded) in `f32`, so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal converts to scalar")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Weight-sum tolerance for `k` weights: [`WEIGHT_SUM_TOL`], widened to
    /// a few ulps per weight when the type cannot resolve it.
    #[inline]
    fn weight_sum_tol(k: usize) -> Self {
        Self::lit(WEIGHT_SUM_TOL).max(Self::lit(4.0) * Self::from_usize_lossy(k.max(1)) * Self::epsilon())
    }

    /// Bound slack: [`BOUND_TOL`], widened to a few ulps for narrow types.
    #[inline]
    fn bound_tol() -> Self {
        Self::lit(BOUND_TOL).max(Self::lit(4.0) * Self::epsilon())
    }
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssignOps
        + Sum
        + Default
        + Debug
        + Display
        + LowerExp
        + Send
        + Sync
        + 'static
{
}

/// Weight-sum tolerance used by feasibility checks.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;
/// Slack allowed on the per-asset `[epsilon, delta]` bounds.
pub const BOUND_TOL: f64 = 1e-12;
/// Strict-improvement threshold for incumbent updates.
pub const IMPROVEMENT_TOL: f64 = 1e-12;

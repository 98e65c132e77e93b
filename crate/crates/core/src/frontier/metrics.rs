//! Percentage deviation of constrained-frontier points from the exact
//! frontier.

use super::{Frontier, FrontierPoint};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Interpolated denominators smaller than this make a direction undefined.
const DENOMINATOR_FLOOR: f64 = 1e-15;
/// Distance under which a point counts as lying on a frontier knot.
const COINCIDENCE_TOL: f64 = 1e-12;

/// Per-point and aggregate deviations, all in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport<T> {
    /// Deviation of each input point, in input order; `None` where neither
    /// direction is defined.
    pub per_point: Vec<Option<T>>,
    pub median_error: T,
    pub mean_error: T,
    /// Mean risk deviation at fixed return.
    pub risk_error: T,
    /// Mean return deviation at fixed risk.
    pub return_error: T,
}

impl<T: Scalar> DeviationReport<T> {
    /// Number of points with a defined deviation.
    pub fn defined(&self) -> usize {
        self.per_point.iter().filter(|p| p.is_some()).count()
    }
}

/// Linear interpolation through `knots` sorted by their first coordinate,
/// clamped to the end values outside the covered range.
fn interpolate<T: Scalar>(knots: &[(T, T)], x: T) -> T {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    // first knot with abscissa >= x; bracketed strictly inside the range
    let j = knots.partition_point(|k| k.0 < x);
    let (xj, yj) = knots[j];
    if xj == x {
        return yj;
    }
    let (xk, yk) = knots[j - 1];
    if xj == xk {
        return yk;
    }
    yk + (yj - yk) * (x - xk) / (xj - xk)
}

fn risk_knots<T: Scalar>(uef: &Frontier<T>) -> Vec<(T, T)> {
    uef.points().iter().map(|p| (p.risk, p.ret)).collect()
}

fn return_knots<T: Scalar>(uef: &Frontier<T>) -> Vec<(T, T)> {
    let mut knots: Vec<(T, T)> = uef.points().iter().map(|p| (p.ret, p.risk)).collect();
    knots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    knots
}

/// Return of the exact frontier at risk `v`.
pub fn interpolate_return<T: Scalar>(uef: &Frontier<T>, v: T) -> Result<T> {
    if uef.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    Ok(interpolate(&risk_knots(uef), v))
}

/// Risk of the exact frontier at return `r`.
pub fn interpolate_risk<T: Scalar>(uef: &Frontier<T>, r: T) -> Result<T> {
    if uef.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    Ok(interpolate(&return_knots(uef), r))
}

fn percent<T: Scalar>(value: T, reference: T) -> Option<T> {
    if reference.abs() < T::lit(DENOMINATOR_FLOOR) {
        None
    } else {
        Some((T::lit(100.0) * (value - reference) / reference).abs())
    }
}

struct Deviations<T> {
    risk_knots: Vec<(T, T)>,
    return_knots: Vec<(T, T)>,
}

impl<T: Scalar> Deviations<T> {
    fn new(uef: &Frontier<T>) -> Result<Self> {
        if uef.is_empty() {
            return Err(Error::EmptyFrontier);
        }
        Ok(Self {
            risk_knots: risk_knots(uef),
            return_knots: return_knots(uef),
        })
    }

    /// Return deviation at the point's risk.
    fn x_direction(&self, p: &FrontierPoint<T>) -> Option<T> {
        percent(p.ret, interpolate(&self.risk_knots, p.risk))
    }

    /// Risk deviation at the point's return.
    fn y_direction(&self, p: &FrontierPoint<T>) -> Option<T> {
        percent(p.risk, interpolate(&self.return_knots, p.ret))
    }

    fn combined(&self, p: &FrontierPoint<T>) -> Option<T> {
        match (self.x_direction(p), self.y_direction(p)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Some(a),
            (None, None) => {
                let tol = T::lit(COINCIDENCE_TOL);
                self.risk_knots
                    .iter()
                    .any(|&(v, r)| (v - p.risk).abs() <= tol && (r - p.ret).abs() <= tol)
                    .then(T::zero)
            }
        }
    }
}

/// Smaller of the return deviation at fixed risk and the risk deviation at
/// fixed return, in percent. `Ok(None)` when both reference values vanish
/// and the point is not on the frontier.
pub fn deviation_error<T: Scalar>(point: &FrontierPoint<T>, uef: &Frontier<T>) -> Result<Option<T>> {
    Ok(Deviations::new(uef)?.combined(point))
}

fn mean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    xs.iter().copied().sum::<T>() / T::from_usize_lossy(xs.len())
}

fn median<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        (sorted[m - 1] + sorted[m]) / T::lit(2.0)
    }
}

/// Deviation summary of every `cef` point against `uef`. Undefined points
/// are left out of the aggregates.
pub fn summary_metrics<T: Scalar>(cef: &Frontier<T>, uef: &Frontier<T>) -> Result<DeviationReport<T>> {
    if cef.is_empty() {
        return Err(Error::EmptyFrontier);
    }
    let dev = Deviations::new(uef)?;
    let per_point: Vec<Option<T>> = cef.points().iter().map(|p| dev.combined(p)).collect();
    let defined: Vec<T> = per_point.iter().flatten().copied().collect();
    let risk: Vec<T> = cef.points().iter().filter_map(|p| dev.y_direction(p)).collect();
    let ret: Vec<T> = cef.points().iter().filter_map(|p| dev.x_direction(p)).collect();
    Ok(DeviationReport {
        median_error: median(&defined),
        mean_error: mean(&defined),
        risk_error: mean(&risk),
        return_error: mean(&ret),
        per_point,
    })
}

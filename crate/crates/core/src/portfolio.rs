//! Candidate portfolios, the scalarized mean-variance objective, and the
//! `Rescale` repair that maps raw weights onto the feasible region.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::scalar::Scalar;

/// Cardinality, quantity bounds and risk aversion for one solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constraints<T> {
    pub k: usize,
    pub epsilon: T,
    pub delta: T,
    pub lambda: T,
}

impl<T: Scalar> Constraints<T> {
    pub fn new(k: usize, epsilon: T, delta: T, lambda: T) -> Result<Self> {
        let c = Self {
            k,
            epsilon,
            delta,
            lambda,
        };
        c.validate()?;
        Ok(c)
    }

    /// Checks ranges and that `k * epsilon <= 1 <= k * delta`.
    ///
    /// `epsilon == delta` is allowed: it pins every weight to `1 / k`.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConstraints("k must be positive".into()));
        }
        if !(self.epsilon >= T::zero() && self.epsilon < T::one()) {
            return Err(Error::InvalidConstraints(format!(
                "epsilon = {} outside [0, 1)",
                self.epsilon
            )));
        }
        if !(self.delta > T::zero() && self.delta <= T::one()) {
            return Err(Error::InvalidConstraints(format!(
                "delta = {} outside (0, 1]",
                self.delta
            )));
        }
        if self.epsilon > self.delta {
            return Err(Error::InvalidConstraints(format!(
                "epsilon = {} exceeds delta = {}",
                self.epsilon, self.delta
            )));
        }
        if !(self.lambda >= T::zero() && self.lambda <= T::one()) {
            return Err(Error::InvalidConstraints(format!(
                "lambda = {} outside [0, 1]",
                self.lambda
            )));
        }
        check_bounds(self.k, self.epsilon, self.delta)
    }

    pub fn with_lambda(mut self, lambda: T) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }
}

fn check_bounds<T: Scalar>(k: usize, epsilon: T, delta: T) -> Result<()> {
    let kf = T::from_usize_lossy(k);
    let slack = T::bound_tol();
    if kf * epsilon > T::one() + slack || kf * delta < T::one() - slack {
        return Err(Error::InfeasibleBounds {
            k,
            epsilon: epsilon.to_f64_lossy(),
            delta: delta.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Held assets `L` paired positionally with their capital fractions `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio<T> {
    assets: Vec<usize>,
    weights: Vec<T>,
}

impl<T: Scalar> Portfolio<T> {
    pub fn new(assets: Vec<usize>, weights: Vec<T>) -> Result<Self> {
        if assets.len() != weights.len() {
            return Err(Error::LengthMismatch {
                assets: assets.len(),
                weights: weights.len(),
            });
        }
        for (pos, a) in assets.iter().enumerate() {
            if assets[..pos].contains(a) {
                return Err(Error::DuplicateAsset(*a));
            }
        }
        Ok(Self { assets, weights })
    }

    pub fn assets(&self) -> &[usize] {
        &self.assets
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }

    pub fn position_of(&self, asset: usize) -> Option<usize> {
        self.assets.iter().position(|&a| a == asset)
    }

    pub fn contains(&self, asset: usize) -> bool {
        self.assets.contains(&asset)
    }

    pub fn weight_of(&self, asset: usize) -> Option<T> {
        self.position_of(asset).map(|p| self.weights[p])
    }

    pub fn weight_sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Pairs sorted by asset id, for stable output.
    pub fn sorted_pairs(&self) -> Vec<(usize, T)> {
        let mut pairs: Vec<_> = self.assets.iter().copied().zip(self.weights.iter().copied()).collect();
        pairs.sort_by_key(|&(a, _)| a);
        pairs
    }

    pub(crate) fn from_parts_unchecked(assets: Vec<usize>, weights: Vec<T>) -> Self {
        debug_assert_eq!(assets.len(), weights.len());
        Self { assets, weights }
    }

    pub(crate) fn into_parts(self) -> (Vec<usize>, Vec<T>) {
        (self.assets, self.weights)
    }

    fn check_indices(&self, n: usize) -> Result<()> {
        match self.assets.iter().find(|&&a| a >= n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, len: n }),
            None => Ok(()),
        }
    }
}

/// Objective value together with its two components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub objective: T,
    pub risk: T,
    pub ret: T,
}

impl<T: Scalar> Evaluation<T> {
    pub fn from_components(risk: T, ret: T, lambda: T) -> Self {
        Self {
            objective: lambda * risk - (T::one() - lambda) * ret,
            risk,
            ret,
        }
    }
}

/// Variance and expected return of `p`, without index checks.
pub(crate) fn risk_return<T: Scalar>(assets: &[usize], weights: &[T], inst: &Instance<T>) -> (T, T) {
    let mut risk = T::zero();
    let mut ret = T::zero();
    for (a, (&i, &wi)) in assets.iter().zip(weights).enumerate() {
        ret += inst.mean_return(i) * wi;
        let mut row = inst.cov(i, i) * wi;
        for (&j, &wj) in assets[a + 1..].iter().zip(&weights[a + 1..]) {
            row += (inst.cov(i, j) + inst.cov(i, j)) * wj;
        }
        risk += wi * row;
    }
    (risk, ret)
}

/// Scores `p` as `lambda * risk - (1 - lambda) * return`; lower is better.
pub fn evaluate<T: Scalar>(p: &Portfolio<T>, inst: &Instance<T>, lambda: T) -> Result<Evaluation<T>> {
    p.check_indices(inst.n())?;
    let (risk, ret) = risk_return(&p.assets, &p.weights, inst);
    Ok(Evaluation::from_components(risk, ret, lambda))
}

fn weights_feasible<T: Scalar>(weights: &[T], epsilon: T, delta: T) -> bool {
    let sum: T = weights.iter().copied().sum();
    let slack = T::bound_tol();
    (sum - T::one()).abs() <= T::weight_sum_tol(weights.len())
        && weights.iter().all(|&w| w >= epsilon - slack && w <= delta + slack)
}

/// True iff `p` holds exactly `k` assets whose weights sum to one and lie in
/// `[epsilon, delta]`.
pub fn is_feasible<T: Scalar>(p: &Portfolio<T>, c: &Constraints<T>) -> bool {
    p.len() == c.k && weights_feasible(&p.weights, c.epsilon, c.delta)
}

/// In-place `Rescale` on a weight vector whose length is the cardinality.
///
/// Weights that already satisfy the sum and bound constraints are left
/// untouched. Otherwise the first pass maps every weight to
/// `epsilon + (w / sum) * (1 - k * epsilon)`; the second pass pins weights
/// above `delta` at `delta` and spreads `1 - (k - r) * epsilon - r * delta`
/// over the remaining `k - r` weights in proportion to their first-pass
/// values, repeating until nothing exceeds `delta`.
pub fn rescale_weights<T: Scalar>(weights: &mut [T], epsilon: T, delta: T) -> Result<()> {
    let k = weights.len();
    if k == 0 {
        return Err(Error::InvalidParameter("cannot rescale an empty portfolio".into()));
    }
    check_bounds(k, epsilon, delta)?;
    for (position, &w) in weights.iter().enumerate() {
        if !(w > T::zero()) || !w.is_finite() {
            return Err(Error::NonPositiveWeight {
                position,
                value: w.to_f64_lossy(),
            });
        }
    }
    if weights_feasible(weights, epsilon, delta) {
        return Ok(());
    }

    let kf = T::from_usize_lossy(k);
    let sum: T = weights.iter().copied().sum();
    let free = T::one() - kf * epsilon;
    for w in weights.iter_mut() {
        *w = epsilon + (*w / sum) * free;
    }

    let first_pass: Vec<T> = weights.to_vec();
    let mut capped = vec![false; k];
    let mut n_capped = 0usize;
    loop {
        let mut grew = false;
        for i in 0..k {
            if !capped[i] && weights[i] > delta {
                capped[i] = true;
                n_capped += 1;
                grew = true;
            }
        }
        if !grew {
            break;
        }
        let r = T::from_usize_lossy(n_capped);
        let free = T::one() - (kf - r) * epsilon - r * delta;
        if free < -T::bound_tol() {
            return Err(Error::InfeasibleBounds {
                k,
                epsilon: epsilon.to_f64_lossy(),
                delta: delta.to_f64_lossy(),
            });
        }
        let free = free.max(T::zero());
        let rest: T = (0..k).filter(|&i| !capped[i]).map(|i| first_pass[i]).sum();
        for i in 0..k {
            weights[i] = if capped[i] {
                delta
            } else {
                epsilon + (first_pass[i] / rest) * free
            };
        }
        if n_capped == k {
            break;
        }
    }
    Ok(())
}

/// Returns a copy of `p` with repaired weights; see [`rescale_weights`].
pub fn rescale<T: Scalar>(p: &Portfolio<T>, epsilon: T, delta: T) -> Result<Portfolio<T>> {
    let mut weights = p.weights.clone();
    rescale_weights(&mut weights, epsilon, delta)?;
    Ok(Portfolio {
        assets: p.assets.clone(),
        weights,
    })
}

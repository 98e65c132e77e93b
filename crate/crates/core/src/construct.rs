//! Greedy initial solution: hold the `k` best assets by Sharpe ratio and
//! keep the best of `t` random weight draws.

use std::cmp::Ordering;

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::portfolio::{evaluate, rescale_weights, Constraints, Evaluation, Portfolio};
use crate::rng::{search_rng, CONSTRUCT_STREAM};
use crate::scalar::Scalar;

/// Default number of random weight trials.
pub const DEFAULT_TRIALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructParams {
    pub trials: usize,
    pub seed: u64,
}

impl Default for ConstructParams {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum RankClass {
    /// zero std dev, positive mean: unbounded ratio
    Unbounded,
    Finite,
    /// zero std dev, non-positive mean
    Degenerate,
}

fn rank_class<T: Scalar>(mean: T, sd: T) -> RankClass {
    if sd > T::zero() {
        RankClass::Finite
    } else if mean > T::zero() {
        RankClass::Unbounded
    } else {
        RankClass::Degenerate
    }
}

/// Asset ids ordered by `mean / std_dev`, best first, ties by ascending id.
///
/// Riskless assets with a positive mean rank ahead of everything else
/// (ordered by mean, descending); riskless assets with a non-positive mean
/// rank last.
pub fn sharpe_rank<T: Scalar>(inst: &Instance<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.n()).collect();
    order.sort_by(|&a, &b| {
        let (ma, sa) = (inst.mean_return(a), inst.std_dev(a));
        let (mb, sb) = (inst.mean_return(b), inst.std_dev(b));
        let (ca, cb) = (rank_class(ma, sa), rank_class(mb, sb));
        ca.cmp(&cb)
            .then_with(|| match ca {
                RankClass::Finite => (mb / sb).partial_cmp(&(ma / sa)).unwrap_or(Ordering::Equal),
                RankClass::Unbounded | RankClass::Degenerate => mb.partial_cmp(&ma).unwrap_or(Ordering::Equal),
            })
            .then(a.cmp(&b))
    });
    order
}

/// Builds the initial portfolio.
///
/// Each trial draws every weight uniformly from `[epsilon, delta]`,
/// normalizes them to sum to one, repairs bounds with `Rescale` and scores
/// the result with `c.lambda`. The first trial achieving the lowest
/// objective wins, so a longer run of the same stream never does worse.
pub fn construct_initial<T: Scalar>(
    inst: &Instance<T>,
    c: &Constraints<T>,
    params: &ConstructParams,
) -> Result<(Portfolio<T>, Evaluation<T>)> {
    c.validate()?;
    if c.k > inst.n() {
        return Err(Error::InvalidParameter(format!(
            "k = {} exceeds the {} available assets",
            c.k,
            inst.n()
        )));
    }
    if params.trials == 0 {
        return Err(Error::InvalidParameter("construct needs at least one trial".into()));
    }

    let assets: Vec<usize> = sharpe_rank(inst).into_iter().take(c.k).collect();
    let lo = c.epsilon.to_f64_lossy();
    let hi = c.delta.to_f64_lossy();
    let mut rng = search_rng(params.seed, CONSTRUCT_STREAM);
    let mut best: Option<(Portfolio<T>, Evaluation<T>)> = None;
    let mut weights = vec![T::zero(); c.k];

    for _ in 0..params.trials {
        for w in weights.iter_mut() {
            let draw = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
            *w = T::lit(draw);
        }
        let sum: T = weights.iter().copied().sum();
        if !(sum > T::zero()) {
            // only reachable with epsilon = 0 and every draw exactly 0
            weights.fill(T::one() / T::from_usize_lossy(c.k));
        } else {
            for w in weights.iter_mut() {
                *w /= sum;
            }
        }
        if weights.iter().any(|&w| !(w > T::zero())) {
            // epsilon = 0 can draw a zero weight; nudge it off the boundary
            let floor = T::min_positive_value();
            for w in weights.iter_mut() {
                *w = w.max(floor);
            }
        }
        rescale_weights(&mut weights, c.epsilon, c.delta)?;
        let candidate = Portfolio::from_parts_unchecked(assets.clone(), weights.clone());
        let eval = evaluate(&candidate, inst, c.lambda)?;
        if best.as_ref().is_none_or(|(_, b)| eval.objective < b.objective) {
            best = Some((candidate, eval));
        }
    }
    Ok(best.expect("at least one trial ran"))
}

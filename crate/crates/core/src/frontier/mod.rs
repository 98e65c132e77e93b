//! Efficient frontiers: the exact long-only frontier traced by QP, the
//! cardinality-constrained frontier traced by the token-ring heuristic over
//! a sweep of risk-aversion values, and the deviation metrics between them.

pub mod csv;
pub mod metrics;
pub mod qp;

use rayon::prelude::*;

use crate::construct::ConstructParams;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::portfolio::{Constraints, Portfolio};
use crate::scalar::Scalar;
use crate::tabu::TabuParams;
use crate::tokenring::{t2_search_with, SearchObserver, T2Config, T2Outcome, DEFAULT_MAX_PASSES};

pub use metrics::{deviation_error, interpolate_return, interpolate_risk, summary_metrics, DeviationReport};
pub use qp::{global_min_variance, solve_qp, solve_qp_min_variance, QpSolution, DEFAULT_QP_TOL};

/// Default number of target returns sampled along the exact frontier.
pub const DEFAULT_UEF_POINTS: usize = 2000;
/// Default spacing of the risk-aversion sweep.
pub const DEFAULT_LAMBDA_STEP: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierPoint<T> {
    pub risk: T,
    pub ret: T,
    /// Risk aversion that produced the point; `None` on the exact frontier.
    pub lambda: Option<T>,
    pub portfolio: Option<Portfolio<T>>,
}

impl<T: Scalar> FrontierPoint<T> {
    pub fn new(risk: T, ret: T) -> Self {
        Self {
            risk,
            ret,
            lambda: None,
            portfolio: None,
        }
    }
}

/// Points ordered by risk, ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Frontier<T> {
    points: Vec<FrontierPoint<T>>,
}

impl<T: Scalar> Frontier<T> {
    /// Sorts by risk (stable, so equal-risk points keep their order).
    pub fn from_points(mut points: Vec<FrontierPoint<T>>) -> Self {
        points.sort_by(|a, b| a.risk.partial_cmp(&b.risk).unwrap_or(std::cmp::Ordering::Equal));
        Self { points }
    }

    pub fn points(&self) -> &[FrontierPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Keeps only points whose return strictly exceeds every lower-risk
    /// point's return. The result is strictly increasing in both
    /// coordinates.
    pub fn non_dominated(&self) -> Self {
        let mut order: Vec<&FrontierPoint<T>> = self.points.iter().collect();
        order.sort_by(|a, b| {
            a.risk
                .partial_cmp(&b.risk)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.ret.partial_cmp(&a.ret).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut kept: Vec<FrontierPoint<T>> = Vec::new();
        for p in order {
            if kept.last().is_none_or(|last| p.ret > last.ret && p.risk > last.risk) {
                kept.push(p.clone());
            }
        }
        Self { points: kept }
    }
}

/// Traces the exact long-only frontier.
///
/// Target returns are spaced evenly from the global minimum-variance
/// portfolio's return to the largest asset mean; each target is solved
/// warm-started from the previous solution. Dominated points are dropped.
pub fn solve_uef<T: Scalar>(inst: &Instance<T>, n_points: usize, tol: T) -> Result<Frontier<T>> {
    Ok(trace_uef(inst, n_points, tol)?.non_dominated())
}

/// The raw sweep of [`solve_uef`], before dominance filtering.
pub fn trace_uef<T: Scalar>(inst: &Instance<T>, n_points: usize, tol: T) -> Result<Frontier<T>> {
    if n_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "the exact frontier needs at least 2 points, got {n_points}"
        )));
    }
    let gmv = qp::global_min_variance(inst, tol)?;
    let r_min = gmv.ret;
    let r_max = inst.max_mean_return();
    let top = qp::argmax_mean(inst);
    let span = r_max - r_min;
    let last = T::from_usize_lossy(n_points - 1);

    let mut points = Vec::with_capacity(n_points);
    let mut prev = gmv.clone();
    points.push(point_from(&gmv));
    for step in 1..n_points {
        let target = if step == n_points - 1 {
            r_max
        } else {
            r_min + span * T::from_usize_lossy(step) / last
        };
        // move the previous optimum toward the top asset until it hits the target
        let mut start = prev.weights.clone();
        let gap = inst.mean_return(top) - prev.ret;
        let theta = if gap > T::zero() {
            ((target - prev.ret) / gap).max(T::zero()).min(T::one())
        } else {
            T::one()
        };
        for w in start.iter_mut() {
            *w *= T::one() - theta;
        }
        start[top] += theta;
        let sol = match qp::solve_with_target(inst, target, start, tol) {
            Ok(sol) => sol,
            Err(_) => qp::solve_with_target(inst, target, qp::two_asset_start(inst, target), tol)?,
        };
        points.push(point_from(&sol));
        prev = sol;
    }
    Ok(Frontier { points })
}

fn point_from<T: Scalar>(sol: &QpSolution<T>) -> FrontierPoint<T> {
    let (assets, weights): (Vec<usize>, Vec<T>) = sol
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > T::zero())
        .map(|(i, &w)| (i, w))
        .unzip();
    FrontierPoint {
        risk: sol.variance,
        ret: sol.ret,
        lambda: None,
        portfolio: Some(Portfolio::from_parts_unchecked(assets, weights)),
    }
}

/// Settings for a risk-aversion sweep of the token-ring heuristic.
#[derive(Debug, Clone, PartialEq)]
pub struct CefConfig<T> {
    pub k: usize,
    pub epsilon: T,
    pub delta: T,
    pub lambda_step: T,
    pub seed: u64,
    pub construct_trials: usize,
    pub tabu: TabuParams,
    pub max_passes: usize,
}

impl<T: Scalar> CefConfig<T> {
    /// `K = 10`, `epsilon = 0.01`, `delta = 1`, `lambda_step = 0.02`.
    pub fn standard(seed: u64) -> Self {
        Self {
            k: 10,
            epsilon: T::lit(0.01),
            delta: T::one(),
            lambda_step: T::lit(DEFAULT_LAMBDA_STEP),
            seed,
            construct_trials: crate::construct::DEFAULT_TRIALS,
            tabu: TabuParams::default(),
            max_passes: DEFAULT_MAX_PASSES,
        }
    }

    /// Risk-aversion values `0, step, 2 step, ..., 1`.
    pub fn lambdas(&self) -> Result<Vec<T>> {
        lambda_grid(self.lambda_step)
    }

    /// Constraints and token-ring configuration for sweep entry `index`.
    /// Entry `i` uses seed `seed + i` for both random streams.
    pub fn run_config(&self, index: usize, lambda: T) -> Result<(Constraints<T>, T2Config<T>)> {
        let c = Constraints::new(self.k, self.epsilon, self.delta, lambda)?;
        let seed = self.seed.wrapping_add(index as u64);
        let mut cfg = T2Config::new(
            ConstructParams {
                trials: self.construct_trials,
                seed,
            },
            self.tabu,
            seed,
        );
        cfg.max_passes = self.max_passes;
        Ok((c, cfg))
    }
}

/// Evenly spaced values from 0 to 1 inclusive; `1 / step` must be a whole
/// number.
pub fn lambda_grid<T: Scalar>(step: T) -> Result<Vec<T>> {
    if !(step > T::zero() && step <= T::one()) {
        return Err(Error::InvalidParameter(format!("lambda step {step} outside (0, 1]")));
    }
    let intervals = (T::one() / step).round();
    if (intervals * step - T::one()).abs() > T::lit(1e-9) {
        return Err(Error::InvalidParameter(format!(
            "lambda step {step} does not divide [0, 1] evenly"
        )));
    }
    let count = intervals.to_usize().unwrap_or(0);
    Ok((0..=count).map(|i| T::from_usize_lossy(i) / intervals).collect())
}

/// One entry of a risk-aversion sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRun<T> {
    pub index: usize,
    pub lambda: T,
    pub outcome: T2Outcome<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CefRun<T> {
    /// Every run's final portfolio, dominated ones included.
    pub frontier: Frontier<T>,
    /// Runs in sweep order.
    pub runs: Vec<LambdaRun<T>>,
}

/// Traces the constrained frontier: one token-ring run per risk-aversion
/// value, executed in parallel on the current rayon pool.
pub fn solve_cef<T: Scalar>(inst: &Instance<T>, config: &CefConfig<T>) -> Result<CefRun<T>> {
    solve_cef_observed(inst, config, |_, _| ()).map(|(run, _)| run)
}

/// As [`solve_cef`], giving each run its own observer built by `factory`
/// from the sweep index and risk aversion. Observers come back in sweep
/// order.
pub fn solve_cef_observed<T, O, F>(inst: &Instance<T>, config: &CefConfig<T>, factory: F) -> Result<(CefRun<T>, Vec<O>)>
where
    T: Scalar,
    O: SearchObserver<T> + Send,
    F: Fn(usize, T) -> O + Sync,
{
    let lambdas = config.lambdas()?;
    // fail on bad bounds before any run starts
    Constraints::new(config.k, config.epsilon, config.delta, T::zero())?;
    if config.k > inst.n() {
        return Err(Error::InvalidParameter(format!(
            "k = {} exceeds the {} available assets",
            config.k,
            inst.n()
        )));
    }

    let results: Vec<Result<(LambdaRun<T>, O)>> = lambdas
        .par_iter()
        .enumerate()
        .map(|(index, &lambda)| {
            let (c, t2) = config.run_config(index, lambda)?;
            let mut observer = factory(index, lambda);
            let outcome = t2_search_with(inst, &c, &t2, &mut observer)?;
            Ok((LambdaRun { index, lambda, outcome }, observer))
        })
        .collect();

    let mut runs = Vec::with_capacity(results.len());
    let mut observers = Vec::with_capacity(results.len());
    for r in results {
        let (run, obs) = r?;
        runs.push(run);
        observers.push(obs);
    }
    let points = runs
        .iter()
        .map(|r| FrontierPoint {
            risk: r.outcome.evaluation.risk,
            ret: r.outcome.evaluation.ret,
            lambda: Some(r.lambda),
            portfolio: Some(r.outcome.best.clone()),
        })
        .collect();
    Ok((
        CefRun {
            frontier: Frontier::from_points(points),
            runs,
        },
        observers,
    ))
}

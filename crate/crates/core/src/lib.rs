//! Cardinality- and bound-constrained mean-variance portfolio selection.
//!
//! A tabu search over Increase, Decrease and Swap moves, run at a sequence
//! of step sizes (the token ring), traces the constrained efficient
//! frontier. An active-set QP solver traces the exact long-only frontier,
//! and deviation metrics compare the two.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` and
//! `*32` aliases below fix the width.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construct;
pub mod error;
pub mod frontier;
pub mod instance;
pub mod neighborhood;
pub mod portfolio;
pub mod rng;
pub mod scalar;
pub mod tabu;
pub mod tokenring;

pub use construct::{construct_initial, sharpe_rank, ConstructParams, DEFAULT_TRIALS};
pub use error::{Error, Result};
pub use frontier::csv::{read_frontier_csv, read_report_csv, write_frontier_csv, write_report_csv};
pub use frontier::{
    deviation_error, global_min_variance, interpolate_return, interpolate_risk, lambda_grid, solve_cef,
    solve_cef_observed, solve_qp, solve_qp_min_variance, solve_uef, summary_metrics, trace_uef, CefConfig, CefRun,
    DeviationReport, Frontier, FrontierPoint, LambdaRun, QpSolution, DEFAULT_LAMBDA_STEP, DEFAULT_QP_TOL,
    DEFAULT_UEF_POINTS,
};
pub use instance::{parse_orlib, write_orlib, AssetStats, Instance};
pub use neighborhood::{enumerate_neighbors, Move, MoveKind};
pub use portfolio::{evaluate, is_feasible, rescale, rescale_weights, Constraints, Evaluation, Portfolio};
pub use rng::{search_rng, SearchRng};
pub use scalar::{Scalar, BOUND_TOL, IMPROVEMENT_TOL, WEIGHT_SUM_TOL};
pub use tabu::{t1_search, t1_search_observed, IterationRecord, T1Outcome, TabuParams, TabuState};
pub use tokenring::{t2_from, t2_search, t2_search_with, Schedule, SearchObserver, T2Config, T2Outcome};

pub type Instance64 = Instance<f64>;
pub type Portfolio64 = Portfolio<f64>;
pub type Constraints64 = Constraints<f64>;
pub type Evaluation64 = Evaluation<f64>;
pub type Frontier64 = Frontier<f64>;
pub type FrontierPoint64 = FrontierPoint<f64>;
pub type DeviationReport64 = DeviationReport<f64>;
pub type CefConfig64 = CefConfig<f64>;

pub type Instance32 = Instance<f32>;
pub type Portfolio32 = Portfolio<f32>;
pub type Constraints32 = Constraints<f32>;
pub type Evaluation32 = Evaluation<f32>;
pub type Frontier32 = Frontier<f32>;
pub type FrontierPoint32 = FrontierPoint<f32>;
pub type DeviationReport32 = DeviationReport<f32>;
pub type CefConfig32 = CefConfig<f32>;

//! Token-ring composition of t1 runs over a decreasing step-size schedule.

use crate::construct::{construct_initial, ConstructParams};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::portfolio::{Constraints, Evaluation, Portfolio};
use crate::rng::{search_rng, SearchRng, SEARCH_STREAM};
use crate::scalar::{Scalar, IMPROVEMENT_TOL};
use crate::tabu::{t1_search_observed, IterationRecord, T1Outcome, TabuParams, TabuState};

/// Passes after which the ring stops even if the last pass improved.
pub const DEFAULT_MAX_PASSES: usize = 50;

/// Warm-up step followed by the per-pass step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<T> {
    pub warmup: T,
    pub steps: Vec<T>,
}

impl<T: Scalar> Default for Schedule<T> {
    /// Warm-up at 5.2, then 5.0, 4.8, ..., 0.2.
    fn default() -> Self {
        Self {
            warmup: T::lit(5.2),
            steps: (0..25).map(|i| T::lit(f64::from(50 - 2 * i) / 10.0)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct T2Config<T> {
    pub schedule: Schedule<T>,
    pub tabu: TabuParams,
    pub construct: ConstructParams,
    pub max_passes: usize,
    /// Seed of the Decrease-replacement stream.
    pub seed: u64,
}

impl<T: Scalar> T2Config<T> {
    pub fn new(construct: ConstructParams, tabu: TabuParams, seed: u64) -> Self {
        Self {
            schedule: Schedule::default(),
            tabu,
            construct,
            max_passes: DEFAULT_MAX_PASSES,
            seed,
        }
    }
}

/// Hooks into a token-ring run. All methods default to no-ops.
pub trait SearchObserver<T> {
    /// Called before each t1 invocation with the state it will start from.
    fn t1_started(&mut self, _invocation: usize, _q: T, _state: &TabuState) {}

    fn iteration(&mut self, _invocation: usize, _q: T, _record: &IterationRecord<T>) {}

    fn pass_finished(&mut self, _pass: usize, _best_objective: T) {}
}

impl<T> SearchObserver<T> for () {}

#[derive(Debug, Clone, PartialEq)]
pub struct T2Outcome<T> {
    pub best: Portfolio<T>,
    pub evaluation: Evaluation<T>,
    pub initial_evaluation: Evaluation<T>,
    pub warmup_objective: T,
    /// Best objective at the end of each pass over the schedule.
    pub pass_objectives: Vec<T>,
    pub t1_invocations: usize,
    pub hit_pass_cap: bool,
}

impl<T> T2Outcome<T> {
    pub fn passes(&self) -> usize {
        self.pass_objectives.len()
    }
}

/// Builds the greedy initial solution and runs the token ring with the
/// default schedule.
pub fn t2_search<T: Scalar>(
    inst: &Instance<T>,
    c: &Constraints<T>,
    construct_params: &ConstructParams,
    tabu_params: &TabuParams,
    seed: u64,
) -> Result<T2Outcome<T>> {
    let config = T2Config::new(*construct_params, *tabu_params, seed);
    t2_search_with(inst, c, &config, &mut ())
}

pub fn t2_search_with<T: Scalar>(
    inst: &Instance<T>,
    c: &Constraints<T>,
    config: &T2Config<T>,
    observer: &mut dyn SearchObserver<T>,
) -> Result<T2Outcome<T>> {
    let (initial, initial_evaluation) = construct_initial(inst, c, &config.construct)?;
    run_ring(inst, c, config, initial, initial_evaluation, observer)
}

/// Runs the token ring from a given feasible starting portfolio.
pub fn t2_from<T: Scalar>(
    inst: &Instance<T>,
    c: &Constraints<T>,
    config: &T2Config<T>,
    initial: Portfolio<T>,
    observer: &mut dyn SearchObserver<T>,
) -> Result<T2Outcome<T>> {
    let eval = crate::portfolio::evaluate(&initial, inst, c.lambda)?;
    run_ring(inst, c, config, initial, eval, observer)
}

fn run_ring<T: Scalar>(
    inst: &Instance<T>,
    c: &Constraints<T>,
    config: &T2Config<T>,
    initial: Portfolio<T>,
    initial_evaluation: Evaluation<T>,
    observer: &mut dyn SearchObserver<T>,
) -> Result<T2Outcome<T>> {
    if config.schedule.steps.is_empty() {
        return Err(Error::InvalidParameter("step schedule is empty".into()));
    }
    if config.max_passes == 0 {
        return Err(Error::InvalidParameter("max_passes must be positive".into()));
    }
    let tol = T::lit(IMPROVEMENT_TOL);
    let mut ring = Ring {
        inst,
        c,
        tabu: &config.tabu,
        rng: search_rng(config.seed, SEARCH_STREAM),
        state: TabuState::new(inst.n()),
        invocations: 0,
    };

    let warm = ring.run(&initial, config.schedule.warmup, observer)?;
    let warmup_objective = warm.evaluation.objective;
    let mut best = warm.best;
    let mut best_eval = warm.evaluation;
    let mut pass_objectives = Vec::new();
    let mut hit_pass_cap = false;

    loop {
        let pass_start = best_eval.objective;
        for &q in &config.schedule.steps {
            let out = ring.run(&best, q, observer)?;
            if out.evaluation.objective < best_eval.objective - tol {
                best = out.best;
                best_eval = out.evaluation;
            }
        }
        pass_objectives.push(best_eval.objective);
        observer.pass_finished(pass_objectives.len() - 1, best_eval.objective);
        if !(best_eval.objective < pass_start - tol) {
            break;
        }
        if pass_objectives.len() >= config.max_passes {
            hit_pass_cap = true;
            break;
        }
    }

    Ok(T2Outcome {
        best,
        evaluation: best_eval,
        initial_evaluation,
        warmup_objective,
        pass_objectives,
        t1_invocations: ring.invocations,
        hit_pass_cap,
    })
}

struct Ring<'a, T> {
    inst: &'a Instance<T>,
    c: &'a Constraints<T>,
    tabu: &'a TabuParams,
    rng: SearchRng,
    state: TabuState,
    invocations: usize,
}

impl<T: Scalar> Ring<'_, T> {
    /// One t1 invocation from `start`, with every tenure cleared first.
    fn run(&mut self, start: &Portfolio<T>, q: T, observer: &mut dyn SearchObserver<T>) -> Result<T1Outcome<T>> {
        self.state.reset();
        let invocation = self.invocations;
        observer.t1_started(invocation, q, &self.state);
        let out = t1_search_observed(
            start,
            q,
            self.inst,
            self.c,
            self.tabu,
            &mut self.state,
            &mut self.rng,
            &mut |rec| observer.iteration(invocation, q, rec),
        )?;
        self.invocations += 1;
        Ok(out)
    }
}

//! Tabu search over the union of the Increase, Decrease and Swap
//! neighborhoods at a fixed step size.
//!
//! Tabu attributes: an Increase or Decrease move forbids repeating the same
//! move kind on the same asset for its tenure. A Swap marks the entering
//! asset, which may then not be swapped out for the Swap tenure. A tabu
//! move is still admissible when it beats the incumbent (aspiration).

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::neighborhood::{enumerate_neighbors, Move, MoveKind};
use crate::portfolio::{evaluate, risk_return, Constraints, Evaluation, Portfolio};
use crate::scalar::{Scalar, IMPROVEMENT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TabuParams {
    pub tenure_increase: u32,
    pub tenure_decrease: u32,
    pub tenure_swap: u32,
    pub stagnation_limit: usize,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            tenure_increase: 3,
            tenure_decrease: 3,
            tenure_swap: 20,
            stagnation_limit: 200,
        }
    }
}

impl TabuParams {
    pub fn tenure(&self, kind: MoveKind) -> u32 {
        match kind {
            MoveKind::Increase => self.tenure_increase,
            MoveKind::Decrease => self.tenure_decrease,
            MoveKind::Swap => self.tenure_swap,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stagnation_limit == 0 {
            return Err(Error::InvalidParameter("stagnation limit must be positive".into()));
        }
        Ok(())
    }
}

/// Remaining tenure per (asset, move kind) plus run counters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuState {
    tenure: Vec<[u32; 3]>,
    pub iteration: usize,
    pub stagnation: usize,
}

impl TabuState {
    pub fn new(n_assets: usize) -> Self {
        Self {
            tenure: vec![[0; 3]; n_assets],
            iteration: 0,
            stagnation: 0,
        }
    }

    pub fn reset(&mut self) {
        for t in &mut self.tenure {
            *t = [0; 3];
        }
        self.iteration = 0;
        self.stagnation = 0;
    }

    pub fn tenure_of(&self, asset: usize, kind: MoveKind) -> u32 {
        self.tenure[asset][kind.slot()]
    }

    pub fn set_tenure(&mut self, asset: usize, kind: MoveKind, value: u32) {
        self.tenure[asset][kind.slot()] = value;
    }

    pub fn is_clear(&self) -> bool {
        self.tenure.iter().all(|t| *t == [0; 3])
    }

    pub fn is_tabu(&self, mv: &Move) -> bool {
        match mv.kind {
            MoveKind::Increase | MoveKind::Decrease => self.tenure_of(mv.target, mv.kind) > 0,
            MoveKind::Swap => mv.displaced.is_some_and(|out| self.tenure_of(out, MoveKind::Swap) > 0),
        }
    }

    /// Ages every tenure by one iteration, then stamps the attribute of the
    /// move just applied.
    pub fn record(&mut self, mv: &Move, params: &TabuParams) {
        for t in &mut self.tenure {
            for v in t.iter_mut() {
                *v = v.saturating_sub(1);
            }
        }
        self.set_tenure(mv.target, mv.kind, params.tenure(mv.kind));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection<T> {
    pub index: usize,
    pub evaluation: Evaluation<T>,
    pub tabu: bool,
}

/// Picks the next move: the best admissible neighbor, where admissible
/// means non-tabu or strictly better than the incumbent. If nothing is
/// admissible the best neighbor overall is taken so the search always
/// advances. Ties go to the earliest neighbor.
pub fn select_admissible<T: Scalar>(
    neighbors: &[(Portfolio<T>, Move)],
    state: &TabuState,
    incumbent_objective: T,
    inst: &Instance<T>,
    lambda: T,
) -> Result<Selection<T>> {
    if neighbors.is_empty() {
        return Err(Error::EmptyNeighborhood);
    }
    let threshold = incumbent_objective - T::lit(IMPROVEMENT_TOL);
    let mut admissible: Option<Selection<T>> = None;
    let mut fallback: Option<Selection<T>> = None;
    for (index, (p, mv)) in neighbors.iter().enumerate() {
        let (risk, ret) = risk_return(p.assets(), p.weights(), inst);
        let evaluation = Evaluation::from_components(risk, ret, lambda);
        let tabu = state.is_tabu(mv);
        let cand = Selection {
            index,
            evaluation,
            tabu,
        };
        let better = |cur: &Option<Selection<T>>| cur.is_none_or(|s| evaluation.objective < s.evaluation.objective);
        if (!tabu || evaluation.objective < threshold) && better(&admissible) {
            admissible = Some(cand);
        }
        if better(&fallback) {
            fallback = Some(cand);
        }
    }
    Ok(admissible.or(fallback).expect("non-empty neighborhood"))
}

/// One iteration of a t1 run, reported to observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    pub objective: T,
    pub incumbent: T,
    pub kind: MoveKind,
    pub target: usize,
    pub tabu: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct T1Outcome<T> {
    pub best: Portfolio<T>,
    pub evaluation: Evaluation<T>,
    pub iterations: usize,
}

/// Runs tabu search from `initial` with step `q` until the incumbent has
/// not improved for `params.stagnation_limit` consecutive iterations.
///
/// `state` is used as given; callers reset it when a fresh run is wanted.
pub fn t1_search<T: Scalar, R: Rng + ?Sized>(
    initial: &Portfolio<T>,
    q: T,
    inst: &Instance<T>,
    c: &Constraints<T>,
    params: &TabuParams,
    state: &mut TabuState,
    rng: &mut R,
) -> Result<T1Outcome<T>> {
    t1_search_observed(initial, q, inst, c, params, state, rng, &mut |_| {})
}

#[allow(clippy::too_many_arguments)]
pub fn t1_search_observed<T: Scalar, R: Rng + ?Sized>(
    initial: &Portfolio<T>,
    q: T,
    inst: &Instance<T>,
    c: &Constraints<T>,
    params: &TabuParams,
    state: &mut TabuState,
    rng: &mut R,
    observer: &mut dyn FnMut(&IterationRecord<T>),
) -> Result<T1Outcome<T>> {
    params.validate()?;
    if state.tenure.len() != inst.n() {
        return Err(Error::InvalidParameter(format!(
            "tabu state tracks {} assets, instance has {}",
            state.tenure.len(),
            inst.n()
        )));
    }
    let mut best = initial.clone();
    let mut best_eval = evaluate(initial, inst, c.lambda)?;
    let mut current = initial.clone();
    state.stagnation = 0;
    let start = state.iteration;

    while state.stagnation < params.stagnation_limit {
        let mut neighbors = enumerate_neighbors(&current, q, inst, c, rng)?;
        let sel = select_admissible(&neighbors, state, best_eval.objective, inst, c.lambda)?;
        let (next, mv) = neighbors.swap_remove(sel.index);
        state.record(&mv, params);
        state.iteration += 1;
        current = next;

        if sel.evaluation.objective < best_eval.objective - T::lit(IMPROVEMENT_TOL) {
            best = current.clone();
            best_eval = sel.evaluation;
            state.stagnation = 0;
        } else {
            state.stagnation += 1;
        }
        observer(&IterationRecord {
            iteration: state.iteration,
            objective: sel.evaluation.objective,
            incumbent: best_eval.objective,
            kind: mv.kind,
            target: mv.target,
            tabu: sel.tabu,
        });
    }

    Ok(T1Outcome {
        best,
        evaluation: best_eval,
        iterations: state.iteration - start,
    })
}

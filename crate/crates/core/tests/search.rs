mod common;

use common::{five_assets, pair_grid_optimum, synthetic_universe};
use tabu_portfolio::neighborhood::increase_move;
use tabu_portfolio::{
    construct_initial, is_feasible, search_rng, t1_search, t2_search, t2_search_with, Constraints, ConstructParams,
    Instance, IterationRecord, MoveKind, Portfolio, SearchObserver, T2Config, TabuParams, TabuState,
};

fn t1_from_construct(inst: &Instance<f64>, c: &Constraints<f64>, q: f64, seed: u64) -> f64 {
    let (start, _) = construct_initial(inst, c, &ConstructParams { trials: 1000, seed }).unwrap();
    let mut state = TabuState::new(inst.n());
    let mut rng = search_rng(seed, 1);
    let out = t1_search(&start, q, inst, c, &TabuParams::default(), &mut state, &mut rng).unwrap();
    assert!(is_feasible(&out.best, c));
    out.evaluation.objective
}

#[test]
fn t1_reaches_pair_enumeration_optimum() {
    let inst = five_assets();
    for lambda in [0.0, 0.5, 1.0] {
        let c = Constraints::new(2, 0.01, 1.0, lambda).unwrap();
        let oracle = pair_grid_optimum(&inst, &c, 0.001);
        for seed in 0..6 {
            let got = t1_from_construct(&inst, &c, 0.5, seed);
            assert!(
                got <= oracle + 0.01 * oracle.abs(),
                "lambda {lambda}, seed {seed}: {got} vs {oracle}"
            );
        }
    }
}

#[test]
fn repeated_increase_settles_at_rescale_fixed_point() {
    // w = eps + (1 - 2 eps) w (1 + q) / (1 + q w) for k = 2, i.e.
    // q w^2 + (1 - q eps - (1 - 2 eps)(1 + q)) w - eps = 0
    let (eps, q) = (0.01f64, 0.1f64);
    let b = 1.0 - q * eps - (1.0 - 2.0 * eps) * (1.0 + q);
    let root = (-b + (b * b + 4.0 * q * eps).sqrt()) / (2.0 * q);
    let c = Constraints::new(2, eps, 1.0, 0.0).unwrap();
    let mut p = Portfolio::new(vec![0, 1], vec![0.5, 0.5]).unwrap();
    for _ in 0..500 {
        p = increase_move(&p, 0, q, &c).unwrap().0;
    }
    assert!((p.weights()[0] - root).abs() < 1e-9, "{} vs {root}", p.weights()[0]);
    assert!(root < 0.91);
}

#[test]
fn token_ring_never_worsens() {
    let inst = synthetic_universe(1, 31);
    for lambda in [0.0, 0.3, 0.5, 0.9, 1.0] {
        let c = Constraints::new(10, 0.01, 1.0, lambda).unwrap();
        let out = t2_search(
            &inst,
            &c,
            &ConstructParams { trials: 500, seed: 5 },
            &TabuParams::default(),
            5,
        )
        .unwrap();
        assert!(is_feasible(&out.best, &c));
        assert!(out.warmup_objective <= out.initial_evaluation.objective);
        let mut prev = out.warmup_objective;
        for &o in &out.pass_objectives {
            assert!(o <= prev);
            prev = o;
        }
        assert_eq!(out.evaluation.objective, *out.pass_objectives.last().unwrap());
    }
}

#[derive(Default)]
struct Recorder {
    starts: Vec<(usize, f64, bool)>,
    kinds: Vec<MoveKind>,
    passes: Vec<f64>,
}

impl SearchObserver<f64> for Recorder {
    fn t1_started(&mut self, invocation: usize, q: f64, state: &TabuState) {
        self.starts.push((invocation, q, state.is_clear()));
    }

    fn iteration(&mut self, _invocation: usize, _q: f64, record: &IterationRecord<f64>) {
        self.kinds.push(record.kind);
    }

    fn pass_finished(&mut self, _pass: usize, best_objective: f64) {
        self.passes.push(best_objective);
    }
}

#[test]
fn every_t1_starts_with_clear_tenures() {
    let inst = synthetic_universe(2, 31);
    let c = Constraints::new(10, 0.01, 1.0, 0.5).unwrap();
    let cfg = T2Config::new(ConstructParams { trials: 200, seed: 9 }, TabuParams::default(), 9);
    let mut rec = Recorder::default();
    let out = t2_search_with(&inst, &c, &cfg, &mut rec).unwrap();
    assert_eq!(rec.starts.len(), out.t1_invocations);
    assert_eq!(out.t1_invocations, 1 + 25 * out.passes());
    assert!(rec.starts.iter().all(|s| s.2));
    assert_eq!(rec.starts[0].1, 5.2);
    assert_eq!(rec.starts[1].1, 5.0);
    assert_eq!(rec.starts[25].1, 0.2);
    assert_eq!(rec.passes, out.pass_objectives);
}

#[test]
fn full_cardinality_never_swaps() {
    let inst = synthetic_universe(3, 12);
    let c = Constraints::new(12, 0.01, 1.0, 0.5).unwrap();
    let cfg = T2Config::new(ConstructParams { trials: 100, seed: 1 }, TabuParams::default(), 1);
    let mut rec = Recorder::default();
    t2_search_with(&inst, &c, &cfg, &mut rec).unwrap();
    assert!(!rec.kinds.is_empty());
    assert!(rec.kinds.iter().all(|&k| k != MoveKind::Swap));
}

#[test]
fn same_seed_same_result() {
    let inst = synthetic_universe(4, 31);
    let c = Constraints::new(10, 0.01, 1.0, 0.7).unwrap();
    let params = ConstructParams { trials: 300, seed: 17 };
    let a = t2_search(&inst, &c, &params, &TabuParams::default(), 17).unwrap();
    let b = t2_search(&inst, &c, &params, &TabuParams::default(), 17).unwrap();
    assert_eq!(a, b);
}

#[test]
fn single_precision_search() {
    let inst = synthetic_universe(5, 20);
    let means: Vec<f32> = (0..20).map(|i| inst.mean_return(i) as f32).collect();
    let cov: Vec<f32> = inst.covariance().iter().map(|&v| v as f32).collect();
    let inst32 = Instance::from_covariance(&means, cov).unwrap();
    let c = Constraints::new(5, 0.01f32, 1.0, 0.5).unwrap();
    let out = t2_search(
        &inst32,
        &c,
        &ConstructParams { trials: 200, seed: 2 },
        &TabuParams::default(),
        2,
    )
    .unwrap();
    assert!(is_feasible(&out.best, &c));
    assert!(out.evaluation.objective <= out.initial_evaluation.objective);
}

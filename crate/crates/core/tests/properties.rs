use eld_core::bfo::BfoState;
use eld_core::problem;
use eld_core::pso::PsoState;
use eld_core::swarm::Evaluator;
use eld_core::{
    abc, bfo, oracle, pso, AbcConfig, BfoConfig, BuiltinProblem, ConstraintHandling, Dispatch, EldProblem, Generator,
    PsoConfig, RngStream, StopCriteria,
};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = Generator> {
    (
        0.0..100.0f64,
        20.0..200.0f64,
        1e-4..1e-2f64,
        1.0..10.0f64,
        0.0..500.0f64,
    )
        .prop_map(|(p_min, range, a, b, c)| Generator::new(p_min, p_min + range, a, b, c).unwrap())
}

/// Feasible problem with `n` units and demand drawn inside the limit sums.
fn problem(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = EldProblem> {
    (prop::collection::vec(unit(), n), 0.0..=1.0f64).prop_map(|(units, t)| {
        let lo: f64 = units.iter().map(|g| g.p_min).sum();
        let hi: f64 = units.iter().map(|g| g.p_max).sum();
        EldProblem::new(units, lo + t * (hi - lo)).unwrap()
    })
}

fn problem_and_raw() -> impl Strategy<Value = (EldProblem, Vec<f64>)> {
    problem(2..=10).prop_flat_map(|p| {
        let n = p.n_units();
        (Just(p), prop::collection::vec(-200.0..600.0f64, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn repair_is_feasible_and_idempotent((p, raw) in problem_and_raw()) {
        let fixed = p.repair_dispatch(&Dispatch::new(raw).unwrap()).unwrap();
        prop_assert!(p.within_limits(&fixed).unwrap());
        prop_assert!(p.power_balance_residual(&fixed).unwrap().abs() <= 1e-6);
        let again = p.repair_dispatch(&fixed).unwrap();
        for (a, b) in fixed.as_slice().iter().zip(again.as_slice()) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn penalty_dominates_cost((p, raw) in problem_and_raw(), penalty in 0.0..1e4f64) {
        let d = Dispatch::new(raw).unwrap();
        let cost = p.evaluate_cost(&d).unwrap();
        let pen = p.penalized_objective(&d, penalty).unwrap();
        prop_assert!(pen >= cost);
        let feasible = p.repair_dispatch(&d).unwrap();
        let cost = p.evaluate_cost(&feasible).unwrap();
        let pen = p.penalized_objective(&feasible, penalty).unwrap();
        prop_assert!((pen - cost).abs() <= 1e-9 * cost.abs().max(1.0));
    }

    #[test]
    fn evaluation_feasibility_flags((p, raw) in problem_and_raw()) {
        let d = Dispatch::new(raw).unwrap();
        let e = p.evaluate(&d).unwrap();
        prop_assert_eq!(e.cost, p.evaluate_cost(&d).unwrap());
        let feasible = e.balance_residual == 0.0 && e.limit_violation == 0.0;
        prop_assert_eq!(feasible, p.within_limits(&d).unwrap() && p.power_balance_residual(&d).unwrap() == 0.0);
    }

    #[test]
    fn oracle_complementarity(p in problem(2..=10)) {
        let s = oracle::solve_default(&p).unwrap();
        prop_assert!(s.residual.abs() <= 1e-7);
        prop_assert!(p.within_limits(&s.dispatch).unwrap());
        for (i, g) in p.generators().iter().enumerate() {
            let x = s.dispatch[i];
            let ic = g.incremental_cost(x);
            if s.binding_units.contains(&i) {
                if (x - g.p_max).abs() < 1e-9 {
                    prop_assert!(ic <= s.lambda + 1e-9);
                } else {
                    prop_assert!((x - g.p_min).abs() < 1e-9);
                    prop_assert!(ic >= s.lambda - 1e-9);
                }
            } else {
                prop_assert!((ic - s.lambda).abs() <= 1e-6 * s.lambda.abs());
            }
        }
    }

    #[test]
    fn oracle_monotone_in_demand(p in problem(2..=6), t in 0.0..=1.0f64, dt in 0.0..=1.0f64) {
        let lo = p.min_total();
        let hi = p.max_total();
        let d1 = lo + t * (hi - lo);
        let d2 = d1 + dt * (hi - d1);
        let a = oracle::solve_default(&EldProblem::new(p.generators().to_vec(), d1).unwrap()).unwrap();
        let b = oracle::solve_default(&EldProblem::new(p.generators().to_vec(), d2).unwrap()).unwrap();
        prop_assert!(b.lambda >= a.lambda - 1e-9);
        prop_assert!(b.cost >= a.cost - 1e-9);
    }

    #[test]
    fn toml_round_trip(p in problem(1..=6)) {
        let back = EldProblem::from_toml_str(&p.to_toml_string()).unwrap();
        prop_assert_eq!(back, p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_report_feasible_monotone_results(p in problem(2..=5), seed in any::<u64>()) {
        let stop = StopCriteria { max_iterations: 40, ..StopCriteria::default() };
        let reports = [
            pso::run(&p, &PsoConfig { stop, ..PsoConfig::default() }, seed).unwrap(),
            abc::run(&p, &AbcConfig { stop, ..AbcConfig::default() }, seed).unwrap(),
            bfo::run(&p, &BfoConfig { n_chemotactic: 5, n_reproduction: 2, ..BfoConfig::default() }, seed).unwrap(),
        ];
        let exact = oracle::solve_default(&p).unwrap();
        for r in &reports {
            prop_assert!(r.trace.is_non_increasing());
            prop_assert!(p.within_limits(&r.best_dispatch).unwrap());
            prop_assert!(p.power_balance_residual(&r.best_dispatch).unwrap().abs() <= 1e-6);
            let cost = p.evaluate_cost(&r.best_dispatch).unwrap();
            prop_assert!((cost - r.best_cost).abs() <= 1e-9 * cost.abs());
            prop_assert!(r.best_cost >= exact.cost - 1e-3);
            prop_assert_eq!(r.trace.last(), Some(r.best_cost));
        }
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let p = EldProblem::builtin(BuiltinProblem::Problem1);
    let a = pso::run(&p, &PsoConfig::default(), 17).unwrap();
    let b = pso::run(&p, &PsoConfig::default(), 17).unwrap();
    assert!(a.same_outcome(&b));
    assert_eq!(a.trace.to_csv_string(), b.trace.to_csv_string());
    let a = abc::run(&p, &AbcConfig::default(), 17).unwrap();
    assert!(a.same_outcome(&abc::run(&p, &AbcConfig::default(), 17).unwrap()));
    let a = bfo::run(&p, &BfoConfig::default(), 17).unwrap();
    assert!(a.same_outcome(&bfo::run(&p, &BfoConfig::default(), 17).unwrap()));
    let c = bfo::run(&p, &BfoConfig::default(), 18).unwrap();
    assert!(!a.same_outcome(&c));
}

#[test]
fn velocity_clamp_holds_through_a_run() {
    let p = EldProblem::builtin(BuiltinProblem::Problem2Corrected);
    let config = PsoConfig {
        w: 1.2,
        c1: 3.0,
        c2: 3.0,
        v_max_fraction: 0.05,
        ..PsoConfig::default()
    };
    let mut ev = Evaluator::new(&p, ConstraintHandling::Repair);
    let mut rng = RngStream::new(1);
    let mut s = PsoState::init(&mut ev, &config, &mut rng).unwrap();
    let mut last = s.gbest_cost;
    for _ in 0..100 {
        s.update_velocity(&config, &mut rng);
        for v in &s.velocities {
            for (x, vm) in v.iter().zip(&s.v_max) {
                assert!(x.abs() <= *vm);
            }
        }
        s.update_position(&mut ev);
        assert!(s.gbest_cost <= last);
        last = s.gbest_cost;
        let min_pbest = s.pbest_costs.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(s.gbest_cost, min_pbest);
    }
}

#[test]
fn motionless_swarm_freezes() {
    let p = EldProblem::builtin(BuiltinProblem::Problem1);
    let config = PsoConfig {
        w: 0.0,
        c1: 0.0,
        c2: 0.0,
        ..PsoConfig::default()
    };
    let mut ev = Evaluator::new(&p, ConstraintHandling::Repair);
    let mut rng = RngStream::new(2);
    let mut s = PsoState::init(&mut ev, &config, &mut rng).unwrap();
    s.update_velocity(&config, &mut rng);
    s.update_position(&mut ev);
    let frozen = s.positions.clone();
    for _ in 0..5 {
        s.update_velocity(&config, &mut rng);
        s.update_position(&mut ev);
        assert_eq!(s.positions, frozen);
    }
}

#[test]
fn bfo_phases_keep_population_and_best() {
    let p = EldProblem::builtin(BuiltinProblem::Problem2Corrected);
    let config = BfoConfig {
        n_bacteria: 8,
        ..BfoConfig::default()
    };
    let mut ev = Evaluator::new(&p, ConstraintHandling::Repair);
    let mut rng = RngStream::new(3);
    let mut s = BfoState::init(&mut ev, &config, &mut rng).unwrap();
    let mut best = s.best_cost;
    for _ in 0..3 {
        for _ in 0..10 {
            for i in 0..8 {
                let swims = s.chemotactic_step(i, &config, &mut ev, &mut rng);
                assert!(swims <= config.n_swim);
                assert!(s.best_cost <= best);
                best = s.best_cost;
            }
        }
        s.reproduce();
        assert_eq!((s.positions.len(), s.costs.len(), s.health.len()), (8, 8, 8));
        s.eliminate_disperse(0.5, &mut ev, &mut rng);
        assert_eq!(s.positions.len(), 8);
        assert!(s.best_cost <= best);
    }
}

#[test]
fn abc_stored_costs_only_drop_between_scouts() {
    let p = EldProblem::builtin(BuiltinProblem::Problem1);
    let mut ev = Evaluator::new(&p, ConstraintHandling::Repair);
    let mut rng = RngStream::new(4);
    let mut s = abc::AbcState::init(&mut ev, &AbcConfig::default(), &mut rng).unwrap();
    for _ in 0..50 {
        let before = s.costs.clone();
        s.employed_phase(&mut ev, &mut rng);
        s.onlooker_phase(&mut ev, &mut rng);
        for (a, b) in before.iter().zip(&s.costs) {
            assert!(b <= a);
        }
        let probs = s.onlooker_probabilities();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        s.scout_phase(3, &mut ev, &mut rng);
        let min_cost = s.costs.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(s.best_cost <= min_cost);
    }
}

#[test]
fn penalty_mode_reports_repaired_dispatch() {
    let p = EldProblem::builtin(BuiltinProblem::Problem1);
    let config = PsoConfig {
        constraints: ConstraintHandling::Penalty { coefficient: 1e4 },
        ..PsoConfig::default()
    };
    let r = pso::run(&p, &config, 9).unwrap();
    assert!(p.within_limits(&r.best_dispatch).unwrap());
    assert!(p.power_balance_residual(&r.best_dispatch).unwrap().abs() <= 1e-6);
    assert_eq!(r.best_cost, p.evaluate_cost(&r.best_dispatch).unwrap());
    assert!(r.best_cost >= 8236.25 - 1e-3);
}

#[test]
fn single_precision_end_to_end() {
    let p: problem::EldProblem<f32> = problem::EldProblem::builtin(BuiltinProblem::Problem1);
    let r = pso::run(&p, &pso::PsoConfig::default(), 1).unwrap();
    assert!((r.best_cost - 8236.25).abs() < 1.0);
    let r = abc::run(&p, &abc::AbcConfig::default(), 1).unwrap();
    assert!((r.best_cost - 8236.25).abs() < 1.0);
    let r = bfo::run(&p, &bfo::BfoConfig::default(), 1).unwrap();
    assert!((r.best_cost - 8236.25).abs() < 1.0);
}

#[test]
fn problem_file_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p1.toml");
    let p = EldProblem::builtin(BuiltinProblem::Problem1);
    std::fs::write(&path, p.to_toml_string()).unwrap();
    assert_eq!(EldProblem::load(&path).unwrap(), p);
}

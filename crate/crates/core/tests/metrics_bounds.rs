use num::{BigRational, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wpi_core::metrics::*;

const REL: f64 = 1e-12;

struct Instance {
    temperature: f64,
    overhead: f64,
    alpha: f64,
    tau: f64,
    ops: u64,
    fraction: f64,
}

fn instance(rng: &mut ChaCha8Rng) -> Instance {
    Instance {
        temperature: rng.random_range(1.0..1000.0),
        overhead: rng.random_range(1.0..1000.0),
        alpha: rng.random_range(0.01..10.0),
        tau: rng.random_range(1e-3..100.0),
        ops: rng.random_range(1..1_000_000_000),
        fraction: 1.0 - rng.random::<f64>(),
    }
}

/// Φ and its floor for an agent with intelligence `fraction·α·N`.
fn phi_and_floor(x: &Instance, fraction: f64) -> (f64, f64) {
    let trace = ExecutionTrace::new(x.ops, x.tau);
    let energy = modeled_energy(&trace, x.overhead, x.temperature).unwrap();
    let intelligence = IntelligenceScore(fraction * x.alpha * x.ops as f64);
    let phi = wpi(energy.power, intelligence).unwrap();
    (phi, phi_lower_bound(x.temperature, x.overhead, x.alpha, x.tau).unwrap())
}

#[test]
fn lower_bound_holds_on_ten_thousand_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut violations = 0;
    for _ in 0..10_000 {
        let x = instance(&mut rng);
        let (phi, floor) = phi_and_floor(&x, x.fraction);
        if phi < floor * (1.0 - REL) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn lower_bound_is_tight_at_full_yield() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe9);
    for _ in 0..10_000 {
        let x = instance(&mut rng);
        let (phi, floor) = phi_and_floor(&x, 1.0);
        assert!(((phi - floor) / floor).abs() <= REL, "{phi} vs {floor}");
    }
}

#[test]
fn reversible_limit_is_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let t = rng.random_range(0.01..1e4);
        let a = rng.random_range(1e-3..1e3);
        let tau = rng.random_range(1e-6..1e6);
        let lb = phi_lower_bound(t, 1.0, a, tau).unwrap();
        assert_eq!(lb.to_bits(), (landauer_constant(t).unwrap() / (a * tau)).to_bits());
        assert_eq!(lb.to_bits(), reversible_floor(t, a, tau).unwrap().to_bits());
    }
}

#[test]
fn score_matches_exact_rational_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let tasks: Vec<TaskRecord> = (0..100)
        .map(|i| TaskRecord::new(format!("t{i:03}"), rng.random_range(0.0..10.0), rng.random::<f64>()))
        .collect();
    let exact = tasks.iter().fold(BigRational::zero(), |acc, t| {
        acc + BigRational::from_float(t.weight).unwrap() * BigRational::from_float(t.performance).unwrap()
    });
    let oracle = exact.to_f64().unwrap();
    let got = intelligence_score(&TaskSuite::new(tasks).unwrap()).unwrap().value();
    assert!(((got - oracle) / oracle).abs() < 1e-12, "{got} vs {oracle}");
}

fn suite_strategy() -> impl Strategy<Value = Vec<TaskRecord>> {
    prop::collection::vec((0.0..100.0f64, 0.0..=1.0f64), 1..40).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (w, p))| TaskRecord::new(format!("task-{i}"), w, p))
            .collect()
    })
}

proptest! {
    #[test]
    fn score_is_permutation_invariant(tasks in suite_strategy(), seed in any::<u64>()) {
        let mut shuffled = tasks.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let a = intelligence_score(&TaskSuite::new(tasks).unwrap()).unwrap().value();
        let b = intelligence_score(&TaskSuite::new(shuffled).unwrap()).unwrap().value();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn score_is_bounded_by_total_weight(tasks in suite_strategy()) {
        let suite = TaskSuite::new(tasks).unwrap();
        let i = intelligence_score(&suite).unwrap().value();
        prop_assert!(i >= 0.0);
        prop_assert!(i <= suite.total_weight() * (1.0 + 1e-12));
    }

    #[test]
    fn phi_strictly_decreasing_in_intelligence(p in 1e-20..1e3f64, i in 1e-3..1e6f64, k in 1.001..10.0f64) {
        let lo = wpi(p, IntelligenceScore(i)).unwrap();
        let hi = wpi(p, IntelligenceScore(i * k)).unwrap();
        prop_assert!(hi < lo);
    }

    #[test]
    fn floor_monotone_in_each_argument(
        t in 1.0..1e3f64, f in 1.0..1e3f64, a in 1e-2..10.0f64, tau in 1e-3..1e2f64, k in 1.001..10.0f64
    ) {
        let base = phi_lower_bound(t, f, a, tau).unwrap();
        prop_assert!(phi_lower_bound(t, f * k, a, tau).unwrap() > base);
        prop_assert!(phi_lower_bound(t, f, a * k, tau).unwrap() < base);
        prop_assert!(phi_lower_bound(t, f, a, tau * k).unwrap() < base);
    }

    #[test]
    fn report_slack_at_least_one(
        n in 1u64..1_000_000_000, f in 1.0..1e3f64, a in 1e-2..10.0f64, tau in 1e-3..1e2f64, u in 1e-6..=1.0f64
    ) {
        let e = modeled_energy(&ExecutionTrace::new(n, tau), f, 300.0).unwrap();
        let r = wpi_report(&e, IntelligenceScore(u * a * n as f64), 300.0, a, tau).unwrap();
        prop_assert!(r.slack >= 1.0 - 1e-12);
        prop_assert!(r.lower_bound >= r.reversible_floor);
    }
}

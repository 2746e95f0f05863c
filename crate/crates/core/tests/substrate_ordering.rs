use proptest::prelude::*;
use wpi_core::metrics::{ExecutionTrace, TaskRecord, TaskSuite};
use wpi_core::par::Exec;
use wpi_core::substrate::*;

fn suite(scale: f64) -> TaskSuite {
    TaskSuite::new(vec![
        TaskRecord::new("parse", 2.0 * scale, 0.75),
        TaskRecord::new("plan", 3.0 * scale, 0.5),
        TaskRecord::new("recall", 1.0 * scale, 1.0),
    ])
    .unwrap()
}

fn runs(factors: &[f64], scale: f64) -> Vec<SubstrateRun> {
    factors
        .iter()
        .enumerate()
        .map(|(i, &f)| SubstrateRun {
            substrate: Substrate::new(format!("s{i:02}"), 300.0, f, 1.0, 1.0).unwrap(),
            trace: ExecutionTrace::new(1_000_000, 1.0),
            suite: suite(scale),
        })
        .collect()
}

#[test]
fn default_catalog_orders_cpu_gpu_neuro() {
    let runs: Vec<SubstrateRun> = default_catalog()
        .into_iter()
        .map(|substrate| SubstrateRun {
            substrate,
            trace: ExecutionTrace::new(1_000_000, 1.0),
            suite: suite(1.0),
        })
        .collect();
    let report = run_comparison(&runs, Exec::default()).unwrap();
    let names: Vec<&str> = report.ordering.iter().map(|s| s.as_str()).collect();
    assert_eq!(names, ["neuro", "GPU", "CPU"]);
    let phi: Vec<f64> = report.rows.iter().map(|r| r.phi).collect();
    assert!(phi[0] < phi[1] && phi[1] < phi[2]);
}

proptest! {
    #[test]
    fn phi_order_follows_overhead_order(factors in prop::collection::vec(1.0..1e4f64, 2..8)) {
        let report = run_comparison(&runs(&factors, 1.0), Exec::default()).unwrap();
        let mut by_f: Vec<(f64, String)> =
            factors.iter().enumerate().map(|(i, &f)| (f, format!("s{i:02}"))).collect();
        by_f.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        let expected: Vec<String> = by_f.into_iter().map(|(_, n)| n).collect();
        prop_assert_eq!(report.ordering, expected);
    }

    #[test]
    fn weight_scaling_keeps_ordering(factors in prop::collection::vec(1.0..1e4f64, 2..6), k in 1e-3..1e3f64) {
        let a = run_comparison(&runs(&factors, 1.0), Exec::default()).unwrap();
        let b = run_comparison(&runs(&factors, k), Exec::default()).unwrap();
        prop_assert_eq!(&a.ordering, &b.ordering);
        let ratio = a.rows[0].phi / b.rows[0].phi;
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            prop_assert!(((ra.phi / rb.phi) / ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn effective_ops_exact_for_binary_fractions(num in 1u32..1 << 20, shift in 0u32..16, n in 0u64..1 << 30) {
        // F = num / 2^shift with F >= 1 is exact in binary; F·N needs < 53 bits
        let f = (num as f64 / (1u64 << shift) as f64).max(1.0);
        let s = Substrate::new("x", 300.0, f, 1.0, 1.0).unwrap();
        let got = effective_ops(&s, n);
        let exact = num::BigRational::from_float(f).unwrap() * num::BigRational::from_integer(n.into());
        prop_assert_eq!(num::BigRational::from_float(got).unwrap(), exact);
    }
}

use num_rational::BigRational;
use pa_clt::asymptotics::{rz_direct, Clock, CoefficientTable};
use pa_clt::stats::CovarianceAccumulator;
use pa_clt::verify::invariant_residual;
use pa_clt::{ExactParams, Params};
use proptest::prelude::*;

// δ = num/4 with num > -4m
fn exact_params() -> impl Strategy<Value = ExactParams> {
    (1usize..=3).prop_flat_map(|m| {
        (-(4 * m as i64) + 1..=40).prop_map(move |num| ExactParams::new(m, BigRational::new(num.into(), 4.into())).unwrap())
    })
}

fn vectors(d: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-50.0..50.0f64, d), 2..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rz_is_symmetric(p in exact_params(), a in 0usize..8, b in 0usize..8) {
        let (r, l) = (p.m() + a, p.m() + b);
        prop_assert_eq!(rz_direct(&p, r, l), rz_direct(&p, l, r));
    }

    #[test]
    fn clocks_differ_only_for_several_edges(p in exact_params(), a in 0usize..6) {
        let table = CoefficientTable::new(&p, p.m() + 6);
        let r = p.m() + a;
        let same = table.rz_direct_with(Clock::Draw, r, r) == table.rz_direct_with(Clock::Vertex, r, r);
        prop_assert_eq!(same, p.m() == 1);
    }

    #[test]
    fn merge_matches_single_pass(xs in vectors(3), split in 0usize..40) {
        let split = split.min(xs.len());
        let mut whole = CovarianceAccumulator::new(1, 3);
        let (mut left, mut right) = (CovarianceAccumulator::new(1, 3), CovarianceAccumulator::new(1, 3));
        for (j, x) in xs.iter().enumerate() {
            whole.accumulate(x).unwrap();
            if j < split { left.accumulate(x).unwrap() } else { right.accumulate(x).unwrap() }
        }
        let mut swapped = right.clone();
        swapped.merge(&left).unwrap();
        left.merge(&right).unwrap();
        let (a, b, c) = (whole.finalize().unwrap(), left.finalize().unwrap(), swapped.finalize().unwrap());
        for ((x, y), z) in a.covariance.entries().iter().zip(b.covariance.entries()).zip(c.covariance.entries()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
            prop_assert!((x - z).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn simulated_states_are_consistent(m in 1usize..=4, frac in 0.05..4.0f64, steps in 2usize..300, seed: u64) {
        let p = Params::new(m, -(m as f64) + frac).unwrap();
        prop_assert!(invariant_residual(&p, steps, seed).unwrap() < 1e-12);
    }
}

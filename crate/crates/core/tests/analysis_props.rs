use evoldpc::analysis::{
    dmin_bound, dmin_exact, encoder_from, exit_vnd, DminResult, EdgeDistribution, JFunction,
};
use evoldpc::codes::{random_regular, ParityCheckMatrix};
use evoldpc::decoder::syndrome;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn arb_code() -> impl Strategy<Value = ParityCheckMatrix> {
    (2usize..9, 4usize..20).prop_flat_map(|(m, n)| {
        let m = m.min(n - 1);
        proptest::collection::vec(proptest::collection::vec(prop::bool::weighted(0.35), n), m).prop_map(|rows| {
            let dense: Vec<Vec<u8>> = rows.into_iter().map(|r| r.into_iter().map(u8::from).collect()).collect();
            ParityCheckMatrix::from_dense(&dense).unwrap()
        })
    })
}

fn check_witness(h: &ParityCheckMatrix, d: &DminResult) {
    assert_eq!(d.witness.len(), h.n());
    assert_eq!(d.witness.iter().filter(|&&b| b == 1).count(), d.value);
    assert!(d.value > 0);
    assert!(syndrome(h, &d.witness).unwrap().iter().all(|&s| s == 0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bound_never_below_exact(h in arb_code(), effort in 1u64..2000) {
        let exact = dmin_exact(&h).unwrap();
        check_witness(&h, &exact);
        let b = dmin_bound(&h, effort).unwrap();
        check_witness(&h, &b);
        prop_assert!(b.value >= exact.value);
        if b.certified {
            prop_assert_eq!(b.value, exact.value);
        }
    }

    #[test]
    fn generator_is_orthogonal_to_h(h in arb_code()) {
        let enc = encoder_from(&h);
        prop_assert_eq!(enc.k(), h.n() - h.rank());
        // Every codeword of the span, not just the basis.
        for msg in 0u32..(1 << enc.k()) {
            let bits: Vec<u8> = (0..enc.k()).map(|j| (msg >> j & 1) as u8).collect();
            let cw = enc.encode(&bits).unwrap();
            prop_assert!(syndrome(&h, &cw).unwrap().iter().all(|&s| s == 0));
        }
    }

    #[test]
    fn vnd_monotone(dv in 2usize..8, s1 in 0.0f64..6.0, ds in 0.0f64..3.0) {
        let jf = JFunction::default();
        let grid: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
        let dist = EdgeDistribution::regular(dv);
        let lo = exit_vnd(&jf, &dist, s1, &grid);
        let hi = exit_vnd(&jf, &dist, s1 + ds, &grid);
        for w in lo.points.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 - 1e-12);
        }
        for (a, b) in lo.points.iter().zip(&hi.points) {
            prop_assert!(b.1 >= a.1 - 1e-12);
            prop_assert!((0.0..=1.0).contains(&a.1));
        }
    }
}

#[test]
fn irregular_vnd_monotone() {
    let jf = JFunction::default();
    let grid: Vec<f64> = (0..101).map(|i| i as f64 / 100.0).collect();
    let dist = EdgeDistribution::new(BTreeMap::from([(1, 0.05), (2, 0.3), (3, 0.4), (8, 0.25)])).unwrap();
    let c = exit_vnd(&jf, &dist, 1.3, &grid);
    assert!(c.points.windows(2).all(|w| w[1].1 >= w[0].1));
}

#[test]
fn bounded_search_certifies_on_length_128() {
    let h = random_regular(128, 3, 6, 21).unwrap();
    let d = dmin_bound(&h, 100_000_000).unwrap();
    check_witness(&h, &d);
    assert!(d.certified);
}

use monotone_thresholds::generators::{gen_random, random_sets};
use monotone_thresholds::lp::{self, ExpectationOracle};
use monotone_thresholds::measure::{self, brute_force_measure, THRESHOLD_MU_TOLERANCE};
use monotone_thresholds::moments::{first_moment, paley_zygmund_bound, second_moment, tame_second_moment_ceiling};
use monotone_thresholds::rational::{ratio, to_f64};
use monotone_thresholds::structure::{self, DecompositionCase};
use monotone_thresholds::{ElementSet, MintermFamily, Rational};
use num::{One, Zero};
use proptest::prelude::*;

/// Raw (not yet minimal) set lists on `n ≤ max_n` elements with sets of
/// size at most `max_k`.
fn raw_family(max_n: usize, max_k: usize, max_sets: usize) -> impl Strategy<Value = (usize, Vec<ElementSet>)> {
    (1..=max_n).prop_flat_map(move |n| {
        let set = proptest::collection::btree_set(0..n, 1..=max_k.min(n))
            .prop_map(ElementSet::from_indices);
        (Just(n), proptest::collection::vec(set, 1..=max_sets))
    })
}

fn family(max_n: usize, max_k: usize, max_sets: usize) -> impl Strategy<Value = MintermFamily> {
    raw_family(max_n, max_k, max_sets).prop_map(|(n, sets)| MintermFamily::minimalize(sets, n).unwrap())
}

fn open_p() -> impl Strategy<Value = Rational> {
    (1i64..20).prop_map(|a| ratio(a, 20))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimalize_is_idempotent((n, sets) in raw_family(10, 5, 12)) {
        let once = MintermFamily::minimalize(sets.clone(), n).unwrap();
        let twice = MintermFamily::minimalize(once.minterms().to_vec(), n).unwrap();
        prop_assert_eq!(&once, &twice);
        for s in ElementSet::prefix(n).subsets() {
            prop_assert_eq!(once.contains(s), sets.iter().any(|m| m.is_subset(s)));
        }
    }

    #[test]
    fn membership_is_monotone(f in family(10, 4, 8)) {
        for s in ElementSet::prefix(f.n()).subsets().filter(|s| f.contains(*s)) {
            for i in 0..f.n() {
                prop_assert!(f.contains(s.with(i)));
            }
        }
    }

    #[test]
    fn supplements_extend_to_minterms(f in family(9, 4, 8), m in 1usize..4) {
        for mt in f.minterms() {
            for v in mt.subsets() {
                for w in f.supplements(v, m) {
                    prop_assert_eq!(w.len(), m);
                    prop_assert!(w.is_disjoint(v));
                    prop_assert!(f.minterms().contains(&w.union(v)));
                }
            }
        }
        if f.len() == 1 {
            for v in ElementSet::prefix(f.n()).subsets() {
                prop_assert!(f.supplements(v, m).len() <= 1);
            }
        }
    }

    #[test]
    fn russo_identities(f in family(9, 4, 6), p in open_p()) {
        let census = measure::census(&f).unwrap();
        let profile = census.pivotal.profile(&p);
        let derivative = census.polynomial.derivative(&p);
        prop_assert_eq!(&p * &derivative, profile.expected_pivotal.clone());
        prop_assert_eq!(derivative, profile.total_influence());
        let mu = census.polynomial.eval(&p);
        prop_assert!(profile.expected_pivotal <= Rational::from_integer((f.k() as i64).into()) * &mu);
        prop_assert_eq!(mu, brute_force_measure(&f, &p));
    }

    #[test]
    fn threshold_point_inverts_measure(f in family(8, 3, 6), x in 0.001f64..0.999) {
        let poly = measure::layer_counts(&f).unwrap();
        let p = poly.threshold_point(x).unwrap();
        prop_assert!((poly.eval_f64(p) - x).abs() <= THRESHOLD_MU_TOLERANCE);
    }

    #[test]
    fn moment_bounds(f in family(8, 3, 6), p in open_p()) {
        let mu = measure::measure(&f, &p).unwrap();
        let first = first_moment(&f, &p).unwrap();
        prop_assert!(first >= mu);
        prop_assert!(paley_zygmund_bound(&f, &p).unwrap() <= mu);
        if structure::is_tame(&f, &p).unwrap().tame {
            let second = second_moment(&f, &p).unwrap().second;
            prop_assert!(second <= tame_second_moment_ceiling(f.k(), &first));
            prop_assert!(structure::tame_lower_bound(&f, &p).unwrap() <= mu);
        }
    }

    #[test]
    fn lp_duality_and_sandwich(f in family(6, 3, 5), q in open_p()) {
        let out = lp::fractional_expectation(&f, &q).unwrap();
        prop_assert!(out.duality_gap().is_zero());
        prop_assert!(lp::check_cover(&f, &out.primal).is_empty());
        prop_assert!(lp::check_spread(&f, &out.dual).is_empty());
        let mut oracle = ExpectationOracle::new(&f);
        let (mu, star, cap) = lp::sandwich(&mut oracle, &q).unwrap();
        prop_assert!(mu <= star && star <= cap);
    }

    #[test]
    fn fractional_expectation_monotone(f in family(6, 3, 5)) {
        let mut oracle = ExpectationOracle::new(&f);
        let values: Vec<Rational> = (1..=10).map(|j| oracle.value(&ratio(j, 10)).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn inverse_points(f in family(6, 3, 5), y in 0.05f64..0.5, x in 0.5f64..0.95) {
        let mut oracle = ExpectationOracle::new(&f);
        let poly = measure::layer_counts(&f).unwrap();
        let top = to_f64(&oracle.value(&Rational::one()).unwrap());
        prop_assume!(x <= top);
        let qx = oracle.inverse(x).unwrap();
        let qy = oracle.inverse(y).unwrap();
        prop_assert!(qx <= qy * x / y + lp::THRESHOLD_COMPARE_TOLERANCE);
        prop_assert!(qx <= poly.threshold_point(x).unwrap() + lp::THRESHOLD_COMPARE_TOLERANCE);
    }

    #[test]
    fn weighted_chain(f in family(6, 3, 5), p in open_p(), alpha in prop_oneof![Just(ratio(1, 2)), Just(ratio(1, 1)), Just(ratio(2, 1))]) {
        let q = &alpha * &p;
        prop_assume!(q <= Rational::one());
        let w = lp::weighted_witness_moments(&f, &p, &q).unwrap();
        prop_assert!(w.first_matches_dual());
        prop_assert!(w.chain_holds());
        prop_assert!(w.second <= w.bound);
        if let Some(pz) = w.pz_bound {
            prop_assert!(pz <= measure::measure(&f, &p).unwrap());
        }
    }

    #[test]
    fn decomposition_certificates(f in family(8, 4, 8), p in open_p()) {
        let d = structure::decompose(&f, &p).unwrap();
        for pair in d.chain.windows(2) {
            prop_assert!(pair[1].minterms().iter().all(|m| pair[0].minterms().contains(m)));
        }
        let half = &p / Rational::from_integer(2.into());
        prop_assert!(structure::is_tame(d.chain.last().unwrap(), &half).unwrap().tame);
        match d.case {
            DecompositionCase::TameSubfamily { measure, .. } => {
                prop_assert!(measure * Rational::from_integer(2.into()) >= d.measure);
            }
            DecompositionCase::TameApproximation { m, approximation, witness, measure, .. } => {
                prop_assert!(measure * Rational::from_integer((1i64 << (m + 1)).into()) >= d.measure);
                prop_assert!(structure::verify_tame_approximation(&f, &approximation, m, &half, &witness).unwrap().pass);
            }
        }
        let h = structure::halving_check(&f, &p).unwrap();
        prop_assert!(h.structural_holds && h.ratio_holds);
    }

    #[test]
    fn single_element_minterms_are_always_tame(n in 1usize..10, p in open_p()) {
        let lists: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let f = MintermFamily::from_index_lists(n, &lists).unwrap();
        prop_assert!(structure::is_tame(&f, &p).unwrap().tame);
        let first = first_moment(&f, &p).unwrap();
        let capped = if first > Rational::one() { Rational::one() } else { first };
        prop_assert_eq!(structure::tame_lower_bound(&f, &p).unwrap(), capped / Rational::from_integer(2.into()));
    }

    #[test]
    fn random_generator_is_an_upset_preserving_antichain(n in 2usize..10, k in 1usize..4, count in 1usize..8, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let f = gen_random(n, k, count, seed).unwrap();
        prop_assert!(f.len() <= count);
        for a in f.minterms() {
            prop_assert_eq!(a.len(), k);
            prop_assert!(f.minterms().iter().all(|b| a == b || !a.is_subset(*b)));
        }
        let raw = random_sets(n, k, count, seed);
        for s in ElementSet::prefix(n).subsets() {
            prop_assert_eq!(f.contains(s), raw.iter().any(|r| r.is_subset(s)));
        }
    }
}

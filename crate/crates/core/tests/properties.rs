use num_traits::{Signed, Zero};
use orbitcert::construction::{dilate_profile, orbit_dilation};
use orbitcert::rational::{from_usize, Rat};
use orbitcert::sequence::TailSums;
use orbitcert::*;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=8).prop_map(|(p, q)| rat(p, q))
}

fn sequence(max_len: usize) -> impl Strategy<Value = FiniteSequence> {
    prop::collection::vec(prop_oneof![1 => Just(Rat::zero()), 3 => rational()], 0..=max_len)
        .prop_map(FiniteSequence::new)
}

fn positive_t() -> impl Strategy<Value = Rat> {
    (1i64..=300, 1i64..=24).prop_map(|(p, q)| rat(p, q))
}

fn positive_c() -> impl Strategy<Value = Rat> {
    (1i64..=40, 1i64..=12).prop_map(|(p, q)| rat(p, q))
}

fn dominated_pair() -> impl Strategy<Value = (FiniteSequence, FiniteSequence)> {
    (any::<u64>(), 1usize..=40)
        .prop_map(|(seed, n)| random_dominated_pair(&DominatedPairGenerator::new(seed, n, 10)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rearrangement_round_trip(x in sequence(20)) {
        let p = x.rearrange();
        prop_assert_eq!(p.restore(), x.clone());
        prop_assert!(p.profile().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(p.profile().iter().all(|v| !v.is_negative()));
        prop_assert_eq!(p.to_sequence().l1_norm(), x.l1_norm());
        prop_assert_eq!(p.to_sequence().l0_norm(), x.l0_norm());
    }

    #[test]
    fn functionals_match_subset_oracles(x in sequence(12), t in positive_t()) {
        prop_assert_eq!(k_eval(&x, &t), brute_k_functional(&x, &t).unwrap());
        prop_assert_eq!(e_functional(&x, &t), brute_e_functional(&x, &t).unwrap());
    }

    #[test]
    fn e_is_subadditive(
        x in sequence(12),
        y in sequence(12),
        t in positive_t(),
        g in (1i64..=23).prop_map(|p| rat(p, 24)),
    ) {
        let lhs = e_functional(&(&x + &y), &t);
        let one_minus = int(1) - &g;
        let rhs = e_functional(&x, &(&g * &t)) + e_functional(&y, &(&one_minus * &t));
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn rearranged_sum_is_bounded_by_halves(x in sequence(14), y in sequence(14)) {
        let s = (&x + &y).rearrange();
        let px = x.rearrange();
        let py = y.rearrange();
        for i in 2..=s.len() {
            prop_assert!(s.at(i) <= px.at(i / 2) + py.at(i / 2));
        }
    }

    #[test]
    fn convex_minorant_sandwich(x in sequence(14), t in positive_t()) {
        let two = int(2);
        let lower = e_star(&x, &t);
        let e = e_functional(&x, &t);
        prop_assert!(lower <= e);
        prop_assert!(e <= &two * e_star(&x, &(&t / &two)));
    }

    #[test]
    fn convex_minorant_is_below_e_on_a_dense_grid(x in sequence(10)) {
        // E* is convex and below E: check both on a grid of step 1/6
        let n = x.l0_norm() + 2;
        let grid: Vec<Rat> = (0..=6 * n).map(|j| rat(j as i64, 6)).collect();
        let vals: Vec<Rat> = grid.iter().map(|t| e_star(&x, t)).collect();
        for (t, v) in grid.iter().zip(&vals) {
            prop_assert!(v <= &e_functional(&x, t));
        }
        for w in vals.windows(3) {
            prop_assert!(&w[0] + &w[2] >= int(2) * &w[1]);
        }
        prop_assert_eq!(&vals[0], &x.l1_norm());
    }

    #[test]
    fn k_envelope_is_concave_and_matches_oracle_at_breakpoints(x in sequence(12)) {
        let k = k_functional(&x);
        let oracle = orbitcert::verification::SubsetOracle::new(&x).unwrap();
        for t in k.breakpoints() {
            prop_assert_eq!(k.eval(t), oracle.k_value(t));
        }
        let slopes: Vec<&Rat> = k.segments().iter().map(|s| &s.slope).collect();
        prop_assert!(slopes.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn dilations_scale_norms(x in sequence(20), m in 1usize..=10) {
        let up = x.dilate_up(m);
        prop_assert_eq!(up.l1_norm(), from_usize(m) * x.l1_norm());
        prop_assert_eq!(up.l0_norm(), m * x.l0_norm());
        let down = x.dilate_down(m);
        prop_assert!(down.l1_norm() <= x.l1_norm() / from_usize(m));
        prop_assert_eq!(SparseOperator::dilation_up(x.len(), m).apply(&x).unwrap(), up);
        prop_assert_eq!(SparseOperator::dilation_down(x.len(), m).apply(&x).unwrap(), down);
    }

    #[test]
    fn criterion_is_monotone_in_c(a in sequence(12), b in sequence(12), c in positive_c(), d in positive_c()) {
        let (lo, hi) = if c <= d { (c, d) } else { (d, c) };
        if check_orbit_criterion(&a, &b, &lo).holds {
            prop_assert!(check_orbit_criterion(&a, &b, &hi).holds);
        }
    }

    #[test]
    fn criterion_at_one_is_tail_domination(a in sequence(12), b in sequence(12)) {
        prop_assert_eq!(
            check_orbit_criterion(&a, &b, &int(1)).holds,
            check_tail_domination(&a, &b).holds
        );
    }

    #[test]
    fn criterion_gives_e_orbit_within_factor_three(a in sequence(12), b in sequence(12), c in positive_c()) {
        if check_orbit_criterion(&a, &b, &c).holds {
            prop_assert!(e_orbit_check(&a, &b, &(int(3) * &c)).holds);
        }
    }

    #[test]
    fn orbit_constant_brackets_the_threshold(a in sequence(10), b in sequence(10)) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let precision = rat(1, 32);
        let iv = orbit_constant(&a, &b, &precision).unwrap();
        prop_assert!(&iv.hi - &iv.lo <= precision);
        prop_assert!(check_orbit_criterion(&a, &b, &iv.hi).holds);
        prop_assert!(!check_orbit_criterion(&a, &b, &iv.lo).holds);
    }

    #[test]
    fn k_orbit_constant_is_the_supremum(a in sequence(10), b in sequence(10)) {
        prop_assume!(!b.is_zero());
        let ck = k_orbit_constant(&a, &b).unwrap();
        let oa = orbitcert::verification::SubsetOracle::new(&a).unwrap();
        let ob = orbitcert::verification::SubsetOracle::new(&b).unwrap();
        let mut expected = (a.l1_norm() / b.l1_norm()).max(from_usize(a.l0_norm()) / from_usize(b.l0_norm()));
        let kinks = k_functional(&a).breakpoints().iter().chain(k_functional(&b).breakpoints()).cloned().collect::<Vec<_>>();
        for t in &kinks {
            expected = expected.max(oa.k_value(t) / ob.k_value(t));
        }
        prop_assert_eq!(&ck, &expected);
        for j in 1..=400i64 {
            let t = rat(j, 20);
            prop_assert!(oa.k_value(&t) / ob.k_value(&t) <= ck);
        }
    }

    #[test]
    fn allocation_identities((a, b) in dominated_pair()) {
        let (pa, pb) = (a.rearrange(), b.rearrange());
        let parts = partition_indices(&pa, &pb);
        let plan = allocate_greedy(&pa, &pb, &parts).unwrap();
        let surplus = |i: usize| pb.at(i + 1) - pa.at(i + 1);
        let mut prev_spill = Rat::zero();
        for block in &plan.blocks {
            // surpluses handed to a block add up to its deficit exactly
            let mut given: Rat = block.consumed.iter().map(|&i| surplus(i)).sum();
            given += &block.eta_prime;
            if block.inherits_spill {
                given += &prev_spill;
            }
            prop_assert_eq!(&given, &block.delta);
            prop_assert!(block.eta_prime.is_positive());
            prop_assert_eq!(&block.eta_prime + &block.spill, surplus(block.carrier));
            prop_assert!(block.consumed.iter().all(|&i| i > block.j && i < block.carrier));
            prev_spill = block.spill.clone();
        }
    }

    #[test]
    fn prop2_columns_respect_bounds((a, b) in dominated_pair()) {
        let (pa, pb) = (a.rearrange(), b.rearrange());
        let cert = build_prop2_operator(&pa, &pb).unwrap();
        prop_assert_eq!(cert.operator.apply(&pb.to_sequence()).unwrap(), pa.to_sequence());
        for (sum, count) in cert.operator.column_stats() {
            prop_assert!(sum <= int(2));
            prop_assert!(count <= 3);
        }
        prop_assert!(verify_certificate(&cert, &pa.to_sequence(), &pb.to_sequence()).passed());
    }

    #[test]
    fn intermediate_majorization_after_dilation(a in sequence(12), b in sequence(12), c in positive_c()) {
        prop_assume!(check_orbit_criterion(&a, &b, &c).holds);
        let target = dilate_profile(&b.rearrange(), orbit_dilation(&c));
        let ta = a.rearrange().tails();
        let tt = TailSums::of(target.values());
        for k in 1..=ta.len() {
            prop_assert!(ta.at(k) <= tt.at(k));
        }
        let cert = build_orbit_operator(&a, &b, &c).unwrap();
        prop_assert!(verify_certificate(&cert, &a, &b).passed());
    }

    #[test]
    fn certificates_satisfy_necessity(a in sequence(12), b in sequence(12), c in positive_c()) {
        prop_assume!(check_orbit_criterion(&a, &b, &c).holds);
        let cert = build_orbit_operator(&a, &b, &c).unwrap();
        prop_assert!(prop1_check(&cert.operator, &b).unwrap().holds);
    }

    #[test]
    fn operators_respect_k_functional(a in sequence(8), b in sequence(8), t in positive_t()) {
        prop_assume!(!b.is_zero());
        let c = orbit_constant(&a, &b, &rat(1, 4)).unwrap().hi;
        let cert = build_orbit_operator(&a, &b, &c).unwrap();
        let m = cert.orbit_norm_bound();
        prop_assert!(k_eval(&a, &t) <= m * k_eval(&b, &t));
    }

    #[test]
    fn alpha_norm_quasi_triangle(x in sequence(30), y in sequence(30)) {
        let w = WeightFamily::telescoping_quadratic();
        let r1 = w.r1.clone();
        let lhs = norm_alpha(&(&x + &y), &w).unwrap();
        let rhs = &r1 * &r1 * (norm_alpha(&x, &w).unwrap() + norm_alpha(&y, &w).unwrap());
        prop_assert!(lhs <= rhs);
    }

    #[test]
    fn marcinkiewicz_sandwich_for_quadratic_weight(x in sequence(60)) {
        let v = sandwich_check(&x, &WeightFamily::telescoping_quadratic()).unwrap();
        prop_assert!(v.holds);
        prop_assert_eq!(v.equiv_norm.lo, v.equiv_norm.hi);
    }
}

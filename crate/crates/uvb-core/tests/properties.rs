use num_bigint::BigInt;
use proptest::prelude::*;

use uvb_core::bundles::{chern_total, restrict_to_line, BundleExpr};
use uvb_core::chow::normal_form;
use uvb_core::constraints::{build_system, residual_chern, SplittingType};
use uvb_core::ring::GeomPoly;
use uvb_core::solver::{solve, SolverConfig, Strategy as Search};

fn geom() -> impl Strategy<Value = GeomPoly> {
    prop::collection::vec((-6i64..=6, 0u32..4, 0u32..7, 0u32..7), 1..6).prop_map(|terms| {
        terms.into_iter().fold(GeomPoly::zero(), |acc, (c, t, u, v)| &acc + &GeomPoly::int_monomial(c, t, u, v))
    })
}

fn bundle() -> impl Strategy<Value = BundleExpr> {
    let atom = (0u8..4, -4i64..=4).prop_map(|(kind, a)| match kind {
        0 => BundleExpr::Line(a),
        1 => BundleExpr::Tangent.twist(a),
        2 => BundleExpr::Cotangent.twist(a),
        _ => BundleExpr::wedge(2, BundleExpr::Tangent.twist(-1)).twist(a),
    });
    prop::collection::vec(atom, 1..4).prop_map(BundleExpr::sum)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn normal_form_is_multiplicative(a in geom(), b in geom(), n in 2u32..=5) {
        let lhs = normal_form(&(&a * &b), n);
        prop_assert_eq!(lhs, normal_form(&a, n).mul(&normal_form(&b, n)));
    }

    #[test]
    fn normal_form_is_idempotent(a in geom(), n in 2u32..=5) {
        let once = normal_form(&a, n);
        prop_assert_eq!(normal_form(once.value(), n), once);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn whitney_sum(e in bundle(), f in bundle(), n in 2u32..=5) {
        let sum = chern_total(&BundleExpr::sum([e.clone(), f.clone()]), n).unwrap();
        prop_assert_eq!(sum, chern_total(&e, n).unwrap().whitney(&chern_total(&f, n).unwrap()));
    }

    #[test]
    fn dual_flips_odd_classes(e in bundle()) {
        let c = chern_total(&e, 4).unwrap();
        let d = chern_total(&e.clone().dual(), 4).unwrap();
        for (i, (x, y)) in c.c.iter().zip(&d.c).enumerate() {
            let want: BigInt = if i % 2 == 1 { -x.clone() } else { x.clone() };
            prop_assert_eq!(y, &want);
        }
    }

    #[test]
    fn twisting_shifts_the_restriction(e in bundle(), a in -5i64..=5) {
        let base = restrict_to_line(&e, 4).unwrap();
        let moved = restrict_to_line(&e.clone().twist(a), 4).unwrap();
        prop_assert_eq!(moved, base.shifted(a));
    }
}

const SMALL: &[&str] = &["2;2,4;1,0", "2;3,3;1,0", "3;1,2,3;2,1,0", "3;1,3,2;2,1,0", "2;2,5;1,0", "3;1,1,5;2,1,0"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn box_monotonicity(case in 0..SMALL.len(), b1 in 1i64..12, extra in 1i64..40) {
        let st: SplittingType = SMALL[case].parse().unwrap();
        let sys = build_system(&st, 4).unwrap();
        let small = solve(&sys, &SolverConfig { bound: b1, ..SolverConfig::default() }).unwrap();
        let large = solve(&sys, &SolverConfig { bound: b1 + extra, ..SolverConfig::default() }).unwrap();
        for t in &small.tuples {
            prop_assert!(large.contains(t));
        }
        for t in &large.tuples {
            if t.iter().all(|x| x.abs() <= b1) {
                prop_assert!(small.contains(t));
            }
        }
    }
}

#[test]
fn solving_is_deterministic_across_modes() {
    for s in SMALL {
        let sys = build_system(&s.parse().unwrap(), 4).unwrap();
        let mut seen = Vec::new();
        for strategy in [Search::Dfs, Search::Hybrid, Search::Elim] {
            for parallel in [true, false] {
                let cfg = SolverConfig { strategy, parallel, bound: 30, ..SolverConfig::default() };
                seen.push(solve(&sys, &cfg).unwrap().tuples);
            }
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]), "{s}");
    }
}

#[test]
fn solutions_have_v_free_products() {
    for s in SMALL {
        let st: SplittingType = s.parse().unwrap();
        let sys = build_system(&st, 4).unwrap();
        for t in solve(&sys, &SolverConfig::default()).unwrap().tuples {
            let c = residual_chern(&st, 4, &t).unwrap();
            assert_eq!(c.c[0], BigInt::from(1), "{s} {t:?}");
            assert!(normal_form(&sys.evaluated_product(&t).unwrap(), 4).is_v_free());
        }
    }
}

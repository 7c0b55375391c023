use approx::assert_relative_eq;
use mvlab::distributions::gls_coefficients;
use mvlab::dominance::{
    ecdf, fsd_test, necessary_screen, quadratic_dominance_test, quadratic_gap, ssd_test, tsd_test,
    DominanceVerdict, Order, Relation,
};
use mvlab::utility::{expected_utility, standard_panel};
use mvlab::DiscreteLottery;
use proptest::prelude::*;

fn lottery() -> impl Strategy<Value = DiscreteLottery> {
    prop::collection::vec((-50i32..=100, 1u32..20), 1..7).prop_map(|raw| {
        let total: u32 = raw.iter().map(|&(_, w)| w).sum();
        DiscreteLottery::new(raw.iter().map(|&(x, w)| (x as f64 / 100.0, w as f64 / total as f64))).unwrap()
    })
}

/// Pairs where dominance actually occurs often enough to exercise the
/// implication checks: `g` is `f` spread out and shifted down.
fn dominated_pair() -> impl Strategy<Value = (DiscreteLottery, DiscreteLottery)> {
    (lottery(), 0.0..0.1f64, 0.0..0.05f64).prop_map(|(f, spread, shift)| {
        let g = DiscreteLottery::new(
            f.outcomes()
                .iter()
                .flat_map(|&(x, p)| [(x - spread - shift, p / 2.0), (x + spread - shift, p / 2.0)]),
        )
        .unwrap();
        (f, g)
    })
}

fn any_pair() -> impl Strategy<Value = (DiscreteLottery, DiscreteLottery)> {
    prop_oneof![(lottery(), lottery()), dominated_pair(), dominated_pair().prop_map(|(f, g)| (g, f))]
}

fn same_or_weaker(stronger: &DominanceVerdict, weaker: &DominanceVerdict) -> bool {
    stronger.relation == Relation::NoDominance || stronger.relation == weaker.relation
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn dominance_orders_nest((a, b) in any_pair()) {
        let (f, g) = (ecdf(&a), ecdf(&b));
        let (d1, d2, d3) = (fsd_test(&f, &g), ssd_test(&f, &g), tsd_test(&f, &g));
        prop_assert!(same_or_weaker(&d1, &d2), "{d1} vs {d2}");
        prop_assert!(same_or_weaker(&d2, &d3), "{d2} vs {d3}");
    }

    #[test]
    fn swapping_inputs_reverses_the_verdict((a, b) in any_pair()) {
        let (f, g) = (ecdf(&a), ecdf(&b));
        prop_assert_eq!(fsd_test(&f, &g).relation, fsd_test(&g, &f).reversed().relation);
        prop_assert_eq!(ssd_test(&f, &g).relation, ssd_test(&g, &f).reversed().relation);
        prop_assert_eq!(tsd_test(&f, &g).relation, tsd_test(&g, &f).reversed().relation);
    }

    #[test]
    fn second_order_dominance_survives_affine_maps(
        (a, b) in dominated_pair(),
        scale in 0.1..3.0f64,
        offset in -0.2..0.2f64,
    ) {
        let (fa, fb) = (a.affine(scale, offset).unwrap(), b.affine(scale, offset).unwrap());
        let verdict = ssd_test(&ecdf(&fa), &ecdf(&fb));
        prop_assert_eq!(verdict.relation, ssd_test(&ecdf(&a), &ecdf(&b)).relation);
        // Keep outcomes inside every panel member's domain.
        prop_assume!(fa.min() > -0.85 && fb.min() > -0.85);
        if verdict.relation == Relation::FirstDominates {
            for u in standard_panel() {
                let (e1, e2) = (expected_utility(&fa, &u).unwrap(), expected_utility(&fb, &u).unwrap());
                prop_assert!(e1 >= e2 - 1e-12, "{u}: {e1} < {e2}");
            }
        }
    }

    #[test]
    fn screen_never_rejects_a_real_dominance((a, b) in any_pair()) {
        let (f, g) = (ecdf(&a), ecdf(&b));
        for (order, verdict) in [
            (Order::First, fsd_test(&f, &g)),
            (Order::Second, ssd_test(&f, &g)),
            (Order::Third, tsd_test(&f, &g)),
        ] {
            if verdict.first_dominates() {
                prop_assert!(necessary_screen(&f, &g, order).is_empty(), "{order:?}");
            }
        }
    }

    #[test]
    fn quadratic_gap_is_the_utility_difference((a, b) in any_pair()) {
        let k = a.max().max(b.max());
        let eu = |l: &DiscreteLottery| l.outcomes().iter().map(|&(x, p)| p * (2.0 * k * x - x * x)).sum::<f64>();
        let gap = quadratic_gap(a.mean(), a.variance(), b.mean(), b.variance(), k);
        prop_assert!((gap - (eu(&a) - eu(&b))).abs() < 1e-12);
        let verdict = quadratic_dominance_test(&ecdf(&a), &ecdf(&b)).unwrap();
        if verdict.relation == Relation::FirstDominates {
            prop_assert!(a.mean() >= b.mean() - 1e-12 && gap >= -1e-12);
        }
    }

    #[test]
    fn gls_coefficients_round_trip(
        r in -0.05..0.05f64,
        mean_y in prop_oneof![-1.0..-0.01f64, 0.01..1.0f64],
        beta in -2.0..2.0f64,
        gamma in 0.0..2.0f64,
    ) {
        let mean_x = r + beta * mean_y;
        let var_x = beta * beta + gamma * gamma;
        let (b, g) = gls_coefficients(mean_x, var_x, r, mean_y).unwrap();
        assert_relative_eq!(b, beta, epsilon = 1e-9, max_relative = 1e-9);
        assert_relative_eq!(g, gamma, epsilon = 1e-6);
    }
}

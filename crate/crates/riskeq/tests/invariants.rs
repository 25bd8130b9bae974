//! Property-based invariants over random games, profiles and distributions.

use std::collections::BTreeMap;

use num::BigRational;
use proptest::prelude::*;
use riskeq::equilibrium::{verify, Verdict};
use riskeq::game::{profile_probability, support, Game, MixedProfile};
use riskeq::scalar::{big_ratio, Mode, Scalar};
use riskeq::valuation::{
    k_moment, risk, two_value_r, two_value_v, valuation, TwoValueDist, ValuationSpec,
};

/// Probability vector with entries k/12.
fn simplex(m: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(0u32..=12, m).prop_map(|raw| {
        let total: u32 = raw.iter().sum();
        if total == 0 {
            let mut v = vec![Scalar::from_ratio(0, 1, Mode::Exact); raw.len()];
            v[0] = Scalar::from_ratio(1, 1, Mode::Exact);
            v
        } else {
            raw.iter()
                .map(|&k| Scalar::Exact(big_ratio(k as i64, total as i64)))
                .collect()
        }
    })
}

fn profile(counts: Vec<usize>) -> impl Strategy<Value = MixedProfile> {
    counts
        .into_iter()
        .map(simplex)
        .collect::<Vec<_>>()
        .prop_map(MixedProfile::new)
}

fn small_game(counts: Vec<usize>, lo: i64) -> impl Strategy<Value = Game> {
    let total: usize = counts.iter().product();
    let n = counts.len();
    prop::collection::vec(lo..=9i64, total * n).prop_map(move |cells| {
        let counts = counts.clone();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let labels: Vec<Vec<String>> = counts
            .iter()
            .map(|&m| (0..m).map(|s| format!("s{s}")).collect())
            .collect();
        Game::from_cost_fn(labels, |s| {
            let flat: usize = s.iter().zip(&strides).map(|(a, b)| a * b).sum();
            (0..n)
                .map(|i| Scalar::from_ratio(cells[flat * n + i], 2, Mode::Exact))
                .collect()
        })
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn profile_probabilities_sum_to_one(p in prop::sample::select(vec![
            vec![2usize, 2], vec![2, 3], vec![3, 2, 2], vec![4, 2],
        ]).prop_flat_map(profile)) {
        let counts: Vec<usize> = p.strategies.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let mut sum = Scalar::from_ratio(0, 1, Mode::Exact);
        for flat in 0..total {
            let mut s = vec![0usize; counts.len()];
            let mut rest = flat;
            for i in (0..counts.len()).rev() {
                s[i] = rest % counts[i];
                rest /= counts[i];
            }
            sum = sum + profile_probability(&p, &s).unwrap();
        }
        prop_assert_eq!(sum, Scalar::from_ratio(1, 1, Mode::Exact));
    }

    #[test]
    fn probability_is_multiplicative_in_one_player(
        p in profile(vec![2, 3, 2]),
        s in (0usize..2, 0usize..3, 0usize..2),
    ) {
        let s = vec![s.0, s.1, s.2];
        let base = profile_probability(&p, &s).unwrap();
        // fixing player 1 to her pure strategy scales by p_1(s_1)
        let pinned = p.with_pure_player(1, s[1], Mode::Exact);
        let pinned_prob = profile_probability(&pinned, &s).unwrap();
        prop_assert_eq!(base, pinned_prob * p.prob(1, s[1]));
    }

    #[test]
    fn support_entries_are_positive_and_in_range(p in profile(vec![3, 4])) {
        let sup = support(&p, 0.0);
        for (i, entries) in sup.0.iter().enumerate() {
            prop_assert!(!entries.is_empty());
            for &s in entries {
                prop_assert!(s < p.strategies[i].len());
                prop_assert!(p.prob(i, s) > &Scalar::from_ratio(0, 1, Mode::Exact));
            }
        }
    }

    #[test]
    fn zeroth_moment_is_one_and_first_vanishes(
        g in small_game(vec![2, 3], -9),
        p in profile(vec![2, 3]),
    ) {
        for i in 0..2 {
            prop_assert_eq!(k_moment(&g, i, &p, 0).unwrap(), Scalar::from_ratio(1, 1, Mode::Exact));
            prop_assert_eq!(k_moment(&g, i, &p, 1).unwrap(), Scalar::from_ratio(0, 1, Mode::Exact));
        }
    }

    #[test]
    fn two_value_forms_match_synthetic_game(
        a in 0i64..6,
        gap in 0i64..5,
        qn in 0i64..=8,
        gamma_num in 1i64..4,
        alpha8 in 0i64..3,
    ) {
        let b = a + gap;
        let q = big_ratio(qn, 8);
        let specs = vec![
            ValuationSpec::Expectation,
            ValuationSpec::var(big_ratio(gamma_num, 2)).unwrap(),
            ValuationSpec::moment_sum(
                BigRational::from_integer(1.into()),
                BTreeMap::from([
                    (2u32, big_ratio(gamma_num, 3)),
                    (8u32, big_ratio(alpha8, 2)),
                ]),
            ).unwrap(),
        ];
        let game = Game::from_cost_fn(
            vec![vec!["me".into()], vec!["lo".into(), "hi".into()]],
            |s| {
                let c = Scalar::from_ratio(if s[1] == 0 { a } else { b }, 1, Mode::Exact);
                vec![c.clone(), c]
            },
        ).unwrap();
        let p = MixedProfile::new(vec![
            vec![Scalar::from_ratio(1, 1, Mode::Exact)],
            vec![
                Scalar::Exact(BigRational::from_integer(1.into()) - &q),
                Scalar::Exact(q.clone()),
            ],
        ]);
        let dist = TwoValueDist::new(
            Scalar::from_ratio(a, 1, Mode::Exact),
            Scalar::from_ratio(b, 1, Mode::Exact),
            Scalar::Exact(q),
        ).unwrap();
        for spec in &specs {
            prop_assert_eq!(
                two_value_v(spec, &dist).unwrap(),
                valuation(spec, &game, 0, &p).unwrap()
            );
            prop_assert_eq!(
                two_value_r(spec, &dist).unwrap(),
                risk(spec, &game, 0, &p).unwrap()
            );
        }
    }

    #[test]
    fn risk_is_nonnegative_for_variance_and_moments(
        g in small_game(vec![2, 2], -9),
        p in profile(vec![2, 2]),
    ) {
        let zero = Scalar::from_ratio(0, 1, Mode::Exact);
        let specs = vec![
            ValuationSpec::var(big_ratio(2, 1)).unwrap(),
            ValuationSpec::moment_sum(
                BigRational::from_integer(1.into()),
                BTreeMap::from([(2u32, big_ratio(1, 1)), (4u32, big_ratio(1, 2))]),
            ).unwrap(),
        ];
        for spec in specs {
            prop_assert!(risk(&spec, &g, 0, &p).unwrap() >= zero);
        }
    }

    #[test]
    fn verify_verdicts_are_deviation_sound(
        g in small_game(vec![2, 3], 0),
        p in profile(vec![2, 3]),
    ) {
        for spec in [ValuationSpec::Expectation, ValuationSpec::var(big_ratio(1, 1)).unwrap()] {
            let report = verify(&spec, &g, &p, 0.0).unwrap();
            match report.verdict {
                Verdict::Equilibrium => {
                    for a in &report.players {
                        prop_assert!(a.slack >= Scalar::from_ratio(0, 1, Mode::Exact));
                    }
                }
                Verdict::Violated { player, strategy } => {
                    // the reported deviation must strictly improve, by
                    // direct re-evaluation
                    let dev = p.with_pure_player(player, strategy, Mode::Exact);
                    let v_dev = valuation(&spec, &g, player, &dev).unwrap();
                    let v_cur = valuation(&spec, &g, player, &p).unwrap();
                    prop_assert!(v_dev < v_cur);
                }
            }
        }
    }

    #[test]
    fn game_json_round_trip_is_stable(g in small_game(vec![2, 2], -9)) {
        let v1 = g.to_json_value();
        let g2 = Game::from_json_value(&v1).unwrap();
        let v2 = g2.to_json_value();
        prop_assert_eq!(
            serde_json::to_string(&v1).unwrap(),
            serde_json::to_string(&v2).unwrap()
        );
    }
}

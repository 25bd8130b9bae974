//! End-to-end searches on the gadget games: equilibrium structure of the SAT
//! game, the scheduling gadget, and the structural argument behind the
//! three-player counterexample.

use num::Zero;
use riskeq::equilibrium::{
    grid_search, pure_equilibria, support_enumeration_2p, wee_residual, DEFAULT_GRID_BUDGET,
    DEFAULT_PURE_BUDGET, DEFAULT_SUPPORT_PAIR_CAP,
};
use riskeq::gadgets::{
    delta_for, mbp_solution_to_profile, mbp_to_scheduling, sat_game, three_player_counterexample,
    CnfFormula, MbpInstance, MbpPlayer, SatLayout,
};
use riskeq::game::support;
use riskeq::properties::{check_mphpn, check_optimal_value, check_wee_at_equilibria, mphpn_violation};
use riskeq::scalar::{big_ratio, Mode, Scalar};
use riskeq::valuation::{expectation, risk, ValuationSpec};

fn var1() -> ValuationSpec {
    ValuationSpec::var(big_ratio(1, 1)).unwrap()
}

/// Support enumeration on the two-variable SAT game finds exactly the
/// profiles that encode satisfying assignments: uniform weight on one true
/// literal per variable, for both players.
#[test]
fn sat_game_equilibria_encode_satisfying_assignments() {
    let spec = var1();
    let delta = delta_for(&spec).unwrap();
    let phi = CnfFormula::new(2, vec![vec![1, 2]]).unwrap();
    let sg = sat_game(&phi, &delta).unwrap();
    let layout = SatLayout::of(&phi);

    let res = support_enumeration_2p(&spec, &sg.game, 0.0, DEFAULT_SUPPORT_PAIR_CAP).unwrap();
    assert!(res.exhausted);
    assert!(!res.found.is_empty(), "satisfiable formula must yield an equilibrium");

    // the constructed profile's support (both positive literals) is present
    let constructed: Vec<usize> = vec![layout.literal(0, true), layout.literal(1, true)];
    assert!(
        res.found.iter().any(|r| {
            let sup = support(&r.profile, 0.0);
            sup.0[0] == constructed && sup.0[1] == constructed
        }),
        "missing the constructed support"
    );

    for report in &res.found {
        let p = &report.profile;
        let sup = support(p, 0.0);
        for i in 0..2 {
            // only literal strategies are played
            assert!(sup.0[i].iter().all(|&s| {
                (layout.num_clauses + phi.num_vars..layout.num_clauses + 3 * phi.num_vars)
                    .contains(&s)
            }));
            // never a literal together with its complement across players
            for v in 0..phi.num_vars {
                let pos = p.prob(i, layout.literal(v, true)).clone();
                let neg = p.prob(1 - i, layout.literal(v, false)).clone();
                assert_eq!(pos * neg, Scalar::zero(Mode::Exact));
            }
            // unit expectation, zero risk
            assert_eq!(
                expectation(&sg.game, i, p).unwrap(),
                Scalar::one(Mode::Exact)
            );
            assert_eq!(risk(&spec, &sg.game, i, p).unwrap(), Scalar::zero(Mode::Exact));
            // and the supported literals induce a satisfying assignment
            let mut assignment = vec![false; phi.num_vars];
            for &s in &sup.0[i] {
                let off = s - layout.num_clauses - phi.num_vars;
                assignment[off / 2] = off % 2 == 0;
            }
            assert!(phi.satisfied_by(&assignment));
        }
        // equal conditional expectations across every support (exact zero
        // residual), the necessary condition the search is built on
        let residuals = wee_residual(&sg.game, p, 0.0).unwrap();
        assert!(residuals.iter().all(|r| r.to_rational().is_zero()));
    }

    let profiles: Vec<&riskeq::game::MixedProfile> =
        res.found.iter().map(|r| &r.profile).collect();
    let wee = check_wee_at_equilibria(&sg.game, &profiles, 0.0).unwrap();
    assert!(wee.passed);
}

/// The scheduling gadget from the unit matching instance: no pure
/// equilibrium, and the lifted profile passes the mixed-player and
/// optimal-value checks exactly.
#[test]
fn mbp_gadget_equilibrium_structure() {
    let t = riskeq::gadgets::TdmInstance::new(1, vec![[1, 1, 1]]).unwrap();
    let mbp = riskeq::gadgets::tdm_to_mbp(&t);
    let spec = var1();
    let cert = mbp_solution_to_profile(&mbp, &[0, 1], &spec, Mode::Exact, 0.0).unwrap();
    let sched = &cert.scheduling;

    // no gadget block can be all-pure at an equilibrium, so no pure profile
    // verifies at all
    let pure =
        pure_equilibria(&spec, &sched.game.eval(Mode::Exact), 0.0, DEFAULT_PURE_BUDGET).unwrap();
    assert!(pure.exhausted);
    assert!(pure.found.is_empty(), "the gadget must not have pure equilibria");

    // the lifted equilibrium has exactly the scale players mixed, and their
    // positively-weighted neighbors all pure
    assert!(mphpn_violation(&sched.game, &cert.profile, 0.0).is_none());
    let sup = support(&cert.profile, 0.0);
    for index in 0..sched.num_players() {
        let mixed = sup.0[index].len() > 1;
        match sched.player_of(index) {
            MbpPlayer::Gadget(_, 4) => assert!(mixed, "scale players mix"),
            _ => assert!(!mixed, "everyone else is pure"),
        }
    }
    let mphpn = check_mphpn(
        &sched.game,
        &spec,
        std::slice::from_ref(&cert.profile),
        Mode::Exact,
        0.0,
    )
    .unwrap();
    assert!(mphpn.passed);

    // equal expectations across the mixed players' links, and value
    // constancy over their support mixtures
    let residuals = wee_residual(&sched.game.eval(Mode::Exact), &cert.profile, 0.0).unwrap();
    for index in 0..sched.num_players() {
        assert!(residuals[index].to_rational().is_zero());
    }
    let scale = sched.player_index(MbpPlayer::Gadget(0, 4));
    let ov = check_optimal_value(
        &spec,
        &sched.game.eval(Mode::Exact),
        scale,
        &cert.profile,
        20,
        0,
        0.0,
    )
    .unwrap();
    assert!(ov.passed, "{:?}", ov.counterexample);
}

/// Seeding the grid search with the lifted profile finds it even when the
/// grid itself (pure profiles only, at unit resolution) contains nothing.
#[test]
fn grid_search_accepts_seeded_gadget_equilibrium() {
    // single-row instance: 3 = 3 + 2*0, so the row alone is a solution
    let mbp = MbpInstance::new(vec![vec![3]]).unwrap();
    assert!(riskeq::gadgets::mbp_verify(&mbp, &[0]));
    let sched = mbp_to_scheduling(&mbp);
    assert_eq!(sched.big_m, 4, "column sum 3 pads up to 4");
    assert_eq!(sched.num_players(), 6);

    let spec = var1();
    let cert = mbp_solution_to_profile(&mbp, &[0], &spec, Mode::Float, 1e-9).unwrap();
    let res = grid_search(
        &spec,
        &sched.game.eval(Mode::Float),
        1.0,
        1e-6,
        DEFAULT_GRID_BUDGET,
        std::slice::from_ref(&cert.profile),
    )
    .unwrap();
    assert!(res.exhausted);
    assert_eq!(res.found.len(), 1, "only the seeded profile verifies");
    assert_eq!(res.found[0].profile, cert.profile);
    assert!(res.candidate_space.contains("seeded"));
}

/// The structural argument behind the three-player counterexample: once two
/// players are pure (as the mixed-player condition forces), no pure split
/// equalizes the third player's conditional expectations, so no player can
/// mix at an equilibrium, and pure profiles were ruled out separately.
#[test]
fn three_player_counterexample_wee_contradiction() {
    let g = three_player_counterexample();
    for i in 0..3usize {
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        for assignment in 0..4usize {
            let links = [assignment & 1, (assignment >> 1) & 1];
            let e1: u64 = others
                .iter()
                .zip(links)
                .filter(|(_, l)| *l == 0)
                .map(|(&j, _)| g.weight(i, j, 0))
                .sum();
            let e2: u64 = others
                .iter()
                .zip(links)
                .filter(|(_, l)| *l == 1)
                .map(|(&j, _)| g.weight(i, j, 1))
                .sum();
            assert_ne!(
                e1, e2,
                "player {i} would be indifferent with others at {links:?}"
            );
        }
    }
}

//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with its runtime (run with `--nocapture` to see them).

use std::time::Instant;

use num::{BigRational, One, Signed};
use riskeq::equilibrium::{
    best_response_dynamics, grid_search, pure_equilibria, support_enumeration_2p, verify,
    DynamicsOutcome, DEFAULT_GRID_BUDGET, DEFAULT_PURE_BUDGET, DEFAULT_SUPPORT_PAIR_CAP,
};
use riskeq::gadgets::{
    crawford, delta_for, mbp_solution_to_profile, mbp_to_scheduling, sat_assignment_to_profile,
    sat_game, tdm_to_mbp, three_player_counterexample, CnfFormula, MbpPlayer, TdmInstance,
};
use riskeq::game::MixedProfile;
use riskeq::properties::{
    check_conditions_2ab, check_crawford_nonexistence, check_e_strict_concavity,
    check_embracing_and_geometric, check_f_identities, check_fp_counterexample,
    check_moment_formula_oracle, check_risk_positivity, check_two_values_monotonicity,
    DEFAULT_SAMPLES, DEFAULT_SEED,
};
use riskeq::sampling::random_game;
use riskeq::scalar::{big_ratio, Mode, Scalar, DEFAULT_TOL};
use riskeq::scheduling::check_ordered_links;
use riskeq::valuation::{
    expectation, risk, two_value_r, CostSource, TwoValueDist, ValuationSpec,
};

fn exact(p: i64, q: i64) -> Scalar {
    Scalar::from_ratio(p, q, Mode::Exact)
}

fn var1() -> ValuationSpec {
    ValuationSpec::var(big_ratio(1, 1)).unwrap()
}

fn sd1() -> ValuationSpec {
    ValuationSpec::sd(big_ratio(1, 1)).unwrap()
}

fn combo_half() -> ValuationSpec {
    ValuationSpec::combo(big_ratio(1, 2), big_ratio(1, 1), 2).unwrap()
}

struct Stopwatch {
    name: &'static str,
    budget_secs: f64,
    start: Instant,
}

impl Stopwatch {
    fn begin(name: &'static str, budget_secs: f64) -> Stopwatch {
        Stopwatch { name, budget_secs, start: Instant::now() }
    }

    fn finish(self, passed: bool) {
        let elapsed = self.start.elapsed().as_secs_f64();
        println!(
            "{}: {} in {elapsed:.2}s (budget {}s)",
            self.name,
            if passed { "PASS" } else { "FAIL" },
            self.budget_secs
        );
        assert!(passed, "{} failed", self.name);
        assert!(
            elapsed < self.budget_secs,
            "{} exceeded its {}s budget ({elapsed:.2}s)",
            self.name,
            self.budget_secs
        );
    }
}

#[test]
fn criterion_1_moment_formula_oracle_equivalence() {
    let sw = Stopwatch::begin("criterion 1 (moment-formula oracle equivalence)", 10.0);
    let report = check_moment_formula_oracle(200, DEFAULT_SEED).unwrap();
    if let Some(ce) = &report.counterexample {
        eprintln!("counterexample: {ce}");
    }
    sw.finish(report.passed);
}

#[test]
fn criterion_2_crawford_nonexistence() {
    let sw = Stopwatch::begin("criterion 2 (crawford nonexistence)", 5.0);
    let mut ok = true;
    for (spec, mode) in [
        (var1(), Mode::Exact),
        (sd1(), Mode::Float),
        (combo_half(), Mode::Float),
    ] {
        for delta in [big_ratio(1, 10), big_ratio(1, 4), big_ratio(1, 2)] {
            let tol = if mode == Mode::Exact { 0.0 } else { DEFAULT_TOL };
            let report = check_crawford_nonexistence(
                &spec,
                &Scalar::from_rational(&delta, mode),
                0.02,
                tol,
            )
            .unwrap();
            if !report.passed {
                eprintln!("spec {spec}, delta {delta}: {:?}", report.counterexample);
                ok = false;
            }
            // the sweep must include the explicit improving deviation of the
            // forced candidate
            ok &= report.domain.contains("forced candidate improved");
        }
    }
    // variance risk at the forced opponent mix is (2 d^2 / 3)(4/3 - x)
    for delta in [big_ratio(1, 10), big_ratio(1, 4), big_ratio(1, 2)] {
        let d = Scalar::Exact(delta.clone());
        let g = crawford(&d).unwrap();
        for x in [exact(0, 1), exact(1, 2), exact(1, 1)] {
            let p = MixedProfile::new(vec![
                vec![x.clone(), exact(1, 1) - &x],
                vec![exact(2, 3), exact(1, 3)],
            ]);
            let got = risk(&var1(), &g, 0, &p).unwrap();
            let expect =
                exact(2, 3) * d.powi(2) * (exact(4, 3) - &x);
            if got != expect {
                eprintln!("variance term mismatch at delta={delta}, x={x}: {got} vs {expect}");
                ok = false;
            }
        }
    }
    sw.finish(ok);
}

#[test]
fn criterion_3_sat_reduction() {
    let sw = Stopwatch::begin("criterion 3 (SAT reduction)", 60.0);
    let spec = var1();
    let delta = delta_for(&spec).unwrap();
    let mut ok = true;

    // satisfiable formulas: the lifted profile is an exact equilibrium with
    // unit valuations for both players
    let satisfiable = [
        CnfFormula::new(2, vec![vec![1, 2]]).unwrap(),
        CnfFormula::new(2, vec![vec![1, 2], vec![-1, 2]]).unwrap(),
    ];
    for phi in &satisfiable {
        let sg = sat_game(phi, &delta).unwrap();
        let profile = sat_assignment_to_profile(phi, &[true, true], Mode::Exact).unwrap();
        let report = verify(&spec, &sg.game, &profile, 0.0).unwrap();
        ok &= report.is_equilibrium();
        for a in &report.players {
            ok &= a.value == exact(1, 1);
        }
    }

    // unsatisfiable formula: exhaustive support enumeration over the
    // 7-strategy game finds nothing
    let phi = CnfFormula::new(1, vec![vec![1], vec![-1]]).unwrap();
    let sg = sat_game(&phi, &delta).unwrap();
    assert_eq!(sg.game.num_strategies(0), 7);
    let res = support_enumeration_2p(&spec, &sg.game, 0.0, DEFAULT_SUPPORT_PAIR_CAP).unwrap();
    ok &= res.found.is_empty() && res.exhausted;
    if !res.found.is_empty() {
        eprintln!(
            "unexpected equilibria: {:?}",
            res.found.iter().map(|r| r.profile.to_string()).collect::<Vec<_>>()
        );
    }
    sw.finish(ok);
}

#[test]
fn criterion_4_matching_to_scheduling_chain() {
    let sw = Stopwatch::begin("criterion 4 (3DM -> MBP -> scheduling chain)", 10.0);
    let mut ok = true;
    let t = TdmInstance::new(1, vec![[1, 1, 1]]).unwrap();
    let mbp = tdm_to_mbp(&t);
    ok &= mbp.a == vec![vec![1, 1, 1], vec![2, 2, 2]];
    ok &= riskeq::gadgets::mbp_verify(&mbp, &[0, 1]);
    let sched = mbp_to_scheduling(&mbp);
    ok &= check_ordered_links(&sched.game).unwrap().is_ordered();

    let cert = mbp_solution_to_profile(&mbp, &[0, 1], &var1(), Mode::Exact, 0.0).unwrap();
    ok &= cert.report.is_equilibrium();
    // x = 1/(2M+1) with M = 4
    ok &= cert.x == big_ratio(1, 9);
    let m_scalar = exact(sched.big_m as i64, 1);
    let x = Scalar::Exact(cert.x.clone());
    let ev = cert.scheduling.game.eval(Mode::Exact);
    for k in 0..mbp.m {
        for j in [0usize, 2] {
            let e = CostSource::expectation(
                &ev,
                cert.scheduling.player_index(MbpPlayer::Gadget(k, j)),
                &cert.profile,
            );
            ok &= e == (exact(3, 1) - &x) * &m_scalar;
        }
        for j in [1usize, 3] {
            let e = CostSource::expectation(
                &ev,
                cert.scheduling.player_index(MbpPlayer::Gadget(k, j)),
                &cert.profile,
            );
            ok &= e == (exact(2, 1) + &x) * (&m_scalar + &exact(1, 1));
        }
    }
    sw.finish(ok);
}

#[test]
fn criterion_5_three_player_counterexample() {
    let sw = Stopwatch::begin("criterion 5 (three-player counterexample)", 120.0);
    let mut ok = true;
    let g = three_player_counterexample();

    let pure = pure_equilibria(&var1(), &g.eval(Mode::Exact), 0.0, DEFAULT_PURE_BUDGET).unwrap();
    ok &= pure.found.is_empty() && pure.exhausted;

    let dynamics =
        best_response_dynamics(&var1(), &g.eval(Mode::Exact), &[0, 0, 0], 1000).unwrap();
    ok &= matches!(dynamics.outcome, DynamicsOutcome::Cycle { .. });

    let moment_spec = ValuationSpec::moment_sum(
        BigRational::one(),
        [(2u32, big_ratio(1, 1)), (4u32, big_ratio(1, 1))].into_iter().collect(),
    )
    .unwrap();
    for spec in [var1(), sd1(), moment_spec] {
        let res = grid_search(
            &spec,
            &g.eval(Mode::Float),
            0.01,
            1e-3,
            DEFAULT_GRID_BUDGET,
            &[],
        )
        .unwrap();
        ok &= res.exhausted;
        if !res.found.is_empty() {
            eprintln!(
                "spec {spec}: grid found {:?}",
                res.found.iter().map(|r| r.profile.to_string()).collect::<Vec<_>>()
            );
            ok = false;
        }
    }
    sw.finish(ok);
}

#[test]
fn criterion_6_delta_threshold_conditions() {
    let sw = Stopwatch::begin("criterion 6 (delta-threshold conditions)", 5.0);
    let mut ok = true;
    for gamma in [big_ratio(1, 4), big_ratio(1, 1), big_ratio(4, 1)] {
        for spec in [
            ValuationSpec::var(gamma.clone()).unwrap(),
            ValuationSpec::sd(gamma.clone()).unwrap(),
            ValuationSpec::combo(big_ratio(1, 2), gamma.clone(), 2).unwrap(),
        ] {
            let delta = delta_for(&spec).unwrap();
            ok &= delta.is_positive() && delta <= big_ratio(1, 4);
            let report = check_conditions_2ab(&spec, &delta).unwrap();
            if !report.passed {
                eprintln!("spec {spec}, delta {delta}: {:?}", report.counterexample);
                ok = false;
            }
            ok &= report.min_margin.unwrap() > 0.0;
        }
    }
    // worked quantities for gamma = 1 variance: delta = 1/8 and the maximal
    // two-value risk hits exactly 1/64 at q = 1/2
    let spec = var1();
    let delta = delta_for(&spec).unwrap();
    ok &= delta == big_ratio(1, 8);
    let max_risk = two_value_r(
        &spec,
        &TwoValueDist::new(exact(1, 1), exact(5, 4), exact(1, 2)).unwrap(),
    )
    .unwrap();
    ok &= max_risk == exact(1, 64);
    // and the grid maximum agrees
    for j in 0..=1000i64 {
        let q = exact(j, 1000);
        let r = two_value_r(
            &spec,
            &TwoValueDist::new(exact(1, 1), exact(5, 4), q).unwrap(),
        )
        .unwrap();
        ok &= r <= max_risk;
    }
    sw.finish(ok);
}

#[test]
fn criterion_7_analytic_lemma_suites() {
    let sw = Stopwatch::begin("criterion 7 (analytic lemma suites)", 30.0);
    let mut ok = true;
    let mut require = |report: riskeq::properties::PropertyReport| {
        if !report.passed {
            eprintln!("{} failed: {:?}", report.property, report.counterexample);
        }
        ok &= report.passed;
    };

    require(check_f_identities().unwrap());
    require(check_embracing_and_geometric().unwrap());

    let moments_all = ValuationSpec::moment_sum(
        BigRational::one(),
        [(2u32, big_ratio(1, 1)), (4u32, big_ratio(1, 1)), (6u32, big_ratio(1, 1)), (8u32, big_ratio(1, 1))]
            .into_iter()
            .collect(),
    )
    .unwrap();
    for spec in [var1(), sd1(), moments_all.clone()] {
        require(check_two_values_monotonicity(&spec).unwrap());
    }

    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for (spec, mode) in [
        (var1(), Mode::Exact),
        (sd1(), Mode::Float),
        (combo_half(), Mode::Float),
    ] {
        let g = random_game(&mut rng, &[2, 3], 0, 9, 3, mode);
        let tol = if mode == Mode::Exact { 0.0 } else { DEFAULT_TOL };
        require(check_e_strict_concavity(&spec, &g, 0, DEFAULT_SAMPLES, DEFAULT_SEED, tol).unwrap());
    }

    let all_specs = [
        (ValuationSpec::Expectation, Mode::Exact),
        (var1(), Mode::Exact),
        (
            ValuationSpec::moment_sum(
                BigRational::one(),
                [(2u32, big_ratio(1, 1)), (4u32, big_ratio(1, 2))].into_iter().collect(),
            )
            .unwrap(),
            Mode::Exact,
        ),
        (sd1(), Mode::Float),
        (ValuationSpec::nu_power(2).unwrap(), Mode::Float),
        (ValuationSpec::nu_power(3).unwrap(), Mode::Float),
        (combo_half(), Mode::Float),
    ];
    for (spec, mode) in all_specs {
        let g = random_game(&mut rng, &[2, 2, 2], 0, 6, 2, mode);
        let tol = if mode == Mode::Exact { 0.0 } else { DEFAULT_TOL };
        require(check_risk_positivity(&spec, &g, DEFAULT_SAMPLES, DEFAULT_SEED, tol).unwrap());
    }
    sw.finish(ok);
}

#[test]
fn criterion_8_appendix_counterexample() {
    let sw = Stopwatch::begin("criterion 8 (appendix counterexample)", 1.0);
    let report = check_fp_counterexample().unwrap();
    if let Some(ce) = &report.counterexample {
        eprintln!("counterexample: {ce}");
    }
    // the headline equalities once more, straight through the public API
    let fp = riskeq::gadgets::fp_counterexample();
    let mut ok = report.passed;
    for row in [0usize, 1] {
        let mut mix = vec![exact(0, 1), exact(0, 1)];
        mix[row] = exact(1, 1);
        let p = fp.profile(mix);
        ok &= -&expectation(&fp.game, 0, &p).unwrap() == exact(2, 1);
        ok &= CostSource::raw_power_mean(&fp.game, 0, &p, 2) == exact(8, 1) + exact(1, 8);
    }
    sw.finish(ok);
}

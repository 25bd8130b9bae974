//! Executable property suites: each check samples a declared domain, records
//! the smallest margin it saw, and on failure returns a counterexample with
//! enough data to re-evaluate the violation through the public API.

use num::{BigRational, One, ToPrimitive};
use serde::Serialize;
use serde_json::json;

use crate::equilibrium::{
    grid_search, pure_equilibria, support_enumeration_2p, verify, wee_residual,
    DEFAULT_GRID_BUDGET, DEFAULT_PURE_BUDGET, DEFAULT_SUPPORT_PAIR_CAP,
};
use crate::error::{Error, Result};
use crate::gadgets::{crawford, fp_counterexample};
use crate::game::{support, Game, MixedProfile};
use crate::sampling::{random_mixed_profile, random_simplex};
use crate::scalar::{Mode, Scalar};
use crate::scheduling::{
    check_ordered_links, embracing_f, f, k_moment_formula, random_two_link_game, SchedulingGame,
};
use crate::valuation::{
    expectation, k_moment, risk, two_value_r, two_value_v, valuation_on, CostSource, TwoValueDist,
    ValuationSpec,
};

/// Default sample count for randomized suites.
pub const DEFAULT_SAMPLES: usize = 500;
/// Default seed for randomized suites.
pub const DEFAULT_SEED: u64 = 0;
/// Residual/value-drift allowance at equilibria, as a multiple of the
/// verification tolerance. The bound is an artifact convention, not a claim
/// from the analysis.
pub const WEE_SLACK_FACTOR: f64 = 10.0;

/// Outcome of one property check.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub property: String,
    /// Human-readable description of the sampled domain.
    pub domain: String,
    pub passed: bool,
    /// Smallest margin observed across the sampled domain, when meaningful.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_margin: Option<f64>,
    /// Inputs and values of the first violation found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub samples: usize,
}

impl PropertyReport {
    fn new(property: &str, domain: String, samples: usize) -> PropertyReport {
        PropertyReport {
            property: property.to_string(),
            domain,
            passed: true,
            min_margin: None,
            counterexample: None,
            seed: None,
            samples,
        }
    }

    fn seeded(mut self, seed: u64) -> PropertyReport {
        self.seed = Some(seed);
        self
    }

    fn observe_margin(&mut self, margin: f64) {
        self.min_margin = Some(self.min_margin.map_or(margin, |m| m.min(margin)));
    }

    fn fail(&mut self, counterexample: serde_json::Value) {
        if self.passed {
            self.passed = false;
            self.counterexample = Some(counterexample);
        }
    }
}

fn rng_from(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Risk positivity
// ---------------------------------------------------------------------------

/// Fuzzes `R >= 0` on random profiles of `g` and checks that `R` vanishes
/// exactly on support-constant costs and is positive on a genuinely two-value
/// distribution.
pub fn check_risk_positivity(
    spec: &ValuationSpec,
    g: &Game,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PropertyReport> {
    let mode = g.mode();
    let mut report = PropertyReport::new(
        "risk-positivity",
        format!(
            "{samples} random profiles on a {:?}-strategy game, mode {mode}",
            g.strategy_counts()
        ),
        samples,
    )
    .seeded(seed);
    let mut rng = rng_from(seed);
    for _ in 0..samples {
        let p = random_mixed_profile(&mut rng, &g.strategy_counts(), mode, 12);
        for i in 0..g.num_players() {
            let r = risk(spec, g, i, &p)?;
            report.observe_margin(r.to_f64());
            if !r.is_nonnegative_tol(tol) {
                report.fail(json!({
                    "player": i,
                    "profile": p,
                    "risk": r.to_f64(),
                }));
            }
        }
    }

    // support-constant costs force zero risk
    let constant = Game::from_cost_fn(
        vec![vec!["a".into(), "b".into()], vec!["a".into(), "b".into()]],
        |_| vec![Scalar::from_int(5, mode), Scalar::from_int(5, mode)],
    )?;
    let uniform = MixedProfile::uniform(&[2, 2], mode);
    for i in 0..2 {
        let r = risk(spec, &constant, i, &uniform)?;
        if !r.is_zero_tol(tol) {
            report.fail(json!({"case": "constant-cost game", "player": i, "risk": r.to_f64()}));
        }
    }

    // a two-value cost with a < b and q strictly inside (0,1) has positive
    // risk for every E + R valuation
    if !matches!(spec, ValuationSpec::Expectation) {
        let two_value = Game::from_cost_fn(
            vec![vec!["m".into()], vec!["lo".into(), "hi".into()]],
            |s| {
                let c = Scalar::from_int(if s[1] == 0 { 1 } else { 2 }, mode);
                vec![c.clone(), c]
            },
        )?;
        let p = MixedProfile::new(vec![
            vec![Scalar::one(mode)],
            vec![Scalar::from_ratio(1, 2, mode), Scalar::from_ratio(1, 2, mode)],
        ]);
        let r = risk(spec, &two_value, 0, &p)?;
        if !r.is_positive_tol(tol) {
            report.fail(json!({"case": "two-value cost", "risk": r.to_f64()}));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Concavity
// ---------------------------------------------------------------------------

/// Samples own-strategy segments with distinct endpoint expectations and
/// asserts the strict concavity inequality with positive margin.
pub fn check_e_strict_concavity(
    spec: &ValuationSpec,
    g: &Game,
    i: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<PropertyReport> {
    if !matches!(
        spec,
        ValuationSpec::VarRisk { .. } | ValuationSpec::SdRisk { .. } | ValuationSpec::Combo { .. }
    ) {
        return Err(Error::UnsupportedValuation(format!(
            "strict-concavity check applies to variance, standard-deviation and combination specs; got {spec}"
        )));
    }
    let mode = g.mode();
    let counts = g.strategy_counts();
    let mut report = PropertyReport::new(
        "e-strict-concavity",
        format!("{trials} sampled segments with expectation gap > {}", 10.0 * tol),
        trials,
    )
    .seeded(seed);
    let mut rng = rng_from(seed);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    while accepted < trials && attempts < trials * 50 {
        attempts += 1;
        let base = random_mixed_profile(&mut rng, &counts, mode, 12);
        let own1 = random_simplex(&mut rng, counts[i], mode, 12);
        let own2 = random_simplex(&mut rng, counts[i], mode, 12);
        let mut p1 = base.clone();
        p1.strategies[i] = own1.clone();
        let mut p2 = base.clone();
        p2.strategies[i] = own2.clone();
        let e1 = expectation(g, i, &p1)?;
        let e2 = expectation(g, i, &p2)?;
        if (&e1 - &e2).abs().to_f64() <= 10.0 * tol {
            continue; // the strictness condition is vacuous here
        }
        accepted += 1;
        let lam = rand::Rng::gen_range(&mut rng, 1..12i64);
        let lambda = Scalar::from_ratio(lam, 12, mode);
        let mut mid = base.clone();
        mid.strategies[i] = own1
            .iter()
            .zip(&own2)
            .map(|(x, y)| &lambda * x + (Scalar::one(mode) - &lambda) * y)
            .collect();
        let v1 = valuation_on(spec, g, i, &p1)?;
        let v2 = valuation_on(spec, g, i, &p2)?;
        let vm = valuation_on(spec, g, i, &mid)?;
        let hull = &lambda * &v1 + (Scalar::one(mode) - &lambda) * &v2;
        let slack = &vm - &hull;
        report.observe_margin(slack.to_f64());
        let strict = match mode {
            Mode::Exact => slack.is_positive_tol(0.0),
            Mode::Float => slack.to_f64() > tol,
        };
        if !strict {
            report.fail(json!({
                "lambda": lambda.to_f64(),
                "segment_low": p1,
                "segment_high": p2,
                "midpoint_value": vm.to_f64(),
                "hull_value": hull.to_f64(),
            }));
        }
    }
    report.samples = accepted;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Equilibrium-side properties
// ---------------------------------------------------------------------------

/// At previously verified equilibria, supported strategies of each player
/// must give (numerically) equal conditional expectations.
pub fn check_wee_at_equilibria<S: CostSource + ?Sized>(
    src: &S,
    equilibria: &[&MixedProfile],
    tol: f64,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "wee-at-equilibria",
        format!(
            "{} verified equilibria, residual cap {} * tol",
            equilibria.len(),
            WEE_SLACK_FACTOR
        ),
        equilibria.len(),
    );
    for (idx, p) in equilibria.iter().enumerate() {
        let residuals = wee_residual(src, p, tol)?;
        for (i, r) in residuals.iter().enumerate() {
            let value = r.to_f64();
            report.observe_margin(WEE_SLACK_FACTOR * tol - value);
            let ok = match src.mode() {
                Mode::Exact => r.is_zero_tol(0.0),
                Mode::Float => value <= WEE_SLACK_FACTOR * tol,
            };
            if !ok {
                report.fail(json!({
                    "equilibrium": idx,
                    "player": i,
                    "residual": value,
                }));
            }
        }
    }
    Ok(report)
}

/// First mixed player whose positively-weighted (link-1) neighbor is also
/// mixed, if any.
pub fn mphpn_violation(g: &SchedulingGame, p: &MixedProfile, tol: f64) -> Option<(usize, usize)> {
    let sup = support(p, tol);
    let mixed: Vec<bool> = sup.0.iter().map(|s| s.len() > 1).collect();
    for i in 0..g.n {
        if !mixed[i] {
            continue;
        }
        for j in 0..g.n {
            if j != i && g.weight(i, j, 0) != 0 && mixed[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// On an ordered-links game, every profile that verifies as an equilibrium
/// must have each player pure or all its positively-weighted neighbors pure.
/// Profiles that fail verification may violate the shape; the report records
/// both facts.
pub fn check_mphpn(
    g: &SchedulingGame,
    spec: &ValuationSpec,
    profiles: &[MixedProfile],
    mode: Mode,
    tol: f64,
) -> Result<PropertyReport> {
    if !check_ordered_links(g)?.is_ordered() {
        return Err(Error::InvalidParameter(
            "mixed-player-has-pure-neighbors applies to ordered-links games".into(),
        ));
    }
    let mut report = PropertyReport::new(
        "mphpn",
        format!("{} profiles on an ordered-links game with {} players", profiles.len(), g.n),
        profiles.len(),
    );
    let mut records = Vec::new();
    for (idx, p) in profiles.iter().enumerate() {
        let verified = verify(spec, &g.eval(mode), p, tol)?.is_equilibrium();
        let violation = mphpn_violation(g, p, tol);
        records.push(json!({
            "profile": idx,
            "is_equilibrium": verified,
            "mphpn_violation": violation.map(|(i, j)| json!({"mixed_player": i, "mixed_neighbor": j})),
        }));
        if verified {
            if let Some((i, j)) = violation {
                report.fail(json!({
                    "profile": p,
                    "mixed_player": i,
                    "mixed_neighbor": j,
                }));
            }
        }
    }
    if report.passed {
        report.domain.push_str(&format!("; outcomes {}", serde_json::Value::Array(records)));
    }
    Ok(report)
}

/// At a verified equilibrium, resampling a player's strategy inside her
/// support must leave her valuation unchanged (up to slack).
pub fn check_optimal_value<S: CostSource + ?Sized>(
    spec: &ValuationSpec,
    src: &S,
    i: usize,
    p: &MixedProfile,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "optimal-value",
        format!("{samples} support-restricted mixtures for player {i}"),
        samples,
    )
    .seeded(seed);
    let baseline = verify(spec, src, p, tol)?;
    if !baseline.is_equilibrium() {
        return Err(Error::InvalidParameter(
            "optimal-value check expects a verified equilibrium".into(),
        ));
    }
    let value = &baseline.players[i].value;
    let sup = support(p, tol);
    let own = &sup.0[i];
    let mode = src.mode();
    let mut rng = rng_from(seed);
    for _ in 0..samples {
        let weights = random_simplex(&mut rng, own.len(), mode, 12);
        let mut strategies = p.strategies.clone();
        let mut own_probs = vec![Scalar::zero(mode); p.strategies[i].len()];
        for (&s, w) in own.iter().zip(&weights) {
            own_probs[s] = w.clone();
        }
        strategies[i] = own_probs;
        let q = MixedProfile::new(strategies);
        let v = valuation_on(spec, src, i, &q)?;
        let drift = (&v - value).abs().to_f64();
        report.observe_margin(WEE_SLACK_FACTOR * tol - drift);
        let ok = match mode {
            Mode::Exact => (&v - value).is_zero_tol(0.0),
            Mode::Float => drift <= WEE_SLACK_FACTOR * tol,
        };
        if !ok {
            report.fail(json!({
                "player": i,
                "resampled": q,
                "value": v.to_f64(),
                "equilibrium_value": value.to_f64(),
            }));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Two-value threshold conditions
// ---------------------------------------------------------------------------

/// Grid check of the two threshold conditions a usable `delta` must satisfy:
/// the two-value risk `R(1, 1+2d, q)` stays below `1/2` on a fine `q` grid,
/// and `V(1, 1+2d, r) < V(1, 2, q)` whenever `0 <= r <= q` on a coarser
/// two-dimensional grid.
pub fn check_conditions_2ab(spec: &ValuationSpec, delta: &BigRational) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "conditions-2ab",
        format!("delta={delta}; q grid step 1/1000 for (a), (r,q) grid step 1/100 for (b)"),
        1001 + 99 * 100,
    );
    let d = delta.to_f64().expect("delta is a small rational");
    let one = Scalar::Float(1.0);
    let b = Scalar::Float(1.0 + 2.0 * d);
    // (2/a)
    let mut max_risk = f64::NEG_INFINITY;
    let mut argmax = 0.0;
    for j in 0..=1000 {
        let q = j as f64 / 1000.0;
        let dist = TwoValueDist::new(one.clone(), b.clone(), Scalar::Float(q))?;
        let r = two_value_r(spec, &dist)?.to_f64();
        if r > max_risk {
            max_risk = r;
            argmax = q;
        }
    }
    report.observe_margin(0.5 - max_risk);
    if max_risk >= 0.5 {
        report.fail(json!({"condition": "2a", "q": argmax, "risk": max_risk, "b": 1.0 + 2.0 * d}));
    }
    // (2/b)
    let two = Scalar::Float(2.0);
    for jq in 1..100 {
        let q = jq as f64 / 100.0;
        let rhs =
            two_value_v(spec, &TwoValueDist::new(one.clone(), two.clone(), Scalar::Float(q))?)?
                .to_f64();
        for jr in 0..=jq {
            let r = jr as f64 / 100.0;
            let lhs =
                two_value_v(spec, &TwoValueDist::new(one.clone(), b.clone(), Scalar::Float(r))?)?
                    .to_f64();
            report.observe_margin(rhs - lhs);
            if lhs >= rhs {
                report.fail(json!({"condition": "2b", "r": r, "q": q, "lhs": lhs, "rhs": rhs}));
            }
        }
    }
    Ok(report)
}

/// The two-value risk, as a function of the gap `d = b - a` and the high
/// probability `q`, must be nondecreasing in `d` and symmetric under
/// `q <-> 1-q`.
pub fn check_two_values_monotonicity(spec: &ValuationSpec) -> Result<PropertyReport> {
    match spec {
        ValuationSpec::VarRisk { .. } | ValuationSpec::SdRisk { .. } => {}
        ValuationSpec::MomentSum { alpha0, .. } if alpha0.is_one() => {}
        other => {
            return Err(Error::UnsupportedValuation(format!(
                "two-value risk monotonicity applies to variance, standard deviation and unit-expectation moment sums; got {other}"
            )))
        }
    }
    let mut report = PropertyReport::new(
        "two-values-risk-monotonicity",
        "gaps d in {1/4, 2/4, ..., 12/4} x probabilities q in {1/100..99/100}".into(),
        12 * 99,
    );
    let exact_friendly = !matches!(spec, ValuationSpec::SdRisk { .. });
    let mode = if exact_friendly { Mode::Exact } else { Mode::Float };
    let zero = Scalar::zero(mode);
    let tol = if exact_friendly { 0.0 } else { 1e-12 };
    for jq in 1..100i64 {
        let q = Scalar::from_ratio(jq, 100, mode);
        let q_mirror = Scalar::from_ratio(100 - jq, 100, mode);
        let mut prev: Option<Scalar> = None;
        for jd in 1..=12i64 {
            let gap = Scalar::from_ratio(jd, 4, mode);
            let dist = TwoValueDist::new(zero.clone(), gap.clone(), q.clone())?;
            let r = two_value_r(spec, &dist)?;
            let mirrored = two_value_r(
                spec,
                &TwoValueDist::new(zero.clone(), gap.clone(), q_mirror.clone())?,
            )?;
            let sym_gap = (&r - &mirrored).abs().to_f64();
            if !(&r - &mirrored).is_zero_tol(tol) {
                report.fail(json!({
                    "case": "symmetry",
                    "d": gap.to_f64(),
                    "q": q.to_f64(),
                    "risk": r.to_f64(),
                    "mirrored": mirrored.to_f64(),
                    "gap": sym_gap,
                }));
            }
            if let Some(prev_r) = &prev {
                let step = &r - prev_r;
                report.observe_margin(step.to_f64() + tol);
                if !step.is_nonnegative_tol(tol) {
                    report.fail(json!({
                        "case": "monotonicity",
                        "d": gap.to_f64(),
                        "q": q.to_f64(),
                        "risk": r.to_f64(),
                        "previous": prev_r.to_f64(),
                    }));
                }
            }
            prev = Some(r);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Polynomial lemmas
// ---------------------------------------------------------------------------

/// Identities of `f`: unit order-zero value, vanishing order one, endpoint
/// zeros for positive orders, evenness / oddness symmetry, positivity of
/// even orders and the sign pattern of odd orders around one half.
pub fn check_f_identities() -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "f-identities",
        "x grid 1/100 over [0,1], orders j <= 9; f(x,0) = 1 holds on the whole interval including the endpoints, endpoint zeros are checked for j >= 1".into(),
        101 * 9,
    );
    let exact = |p: i64, q: i64| Scalar::from_ratio(p, q, Mode::Exact);
    let zero = exact(0, 1);
    let one = exact(1, 1);
    let mut require = |ok: bool, ce: serde_json::Value| {
        if !ok {
            report.fail(ce);
        }
    };
    for num in 0..=100i64 {
        let x = exact(num, 100);
        require(f(&x, 0) == one, json!({"identity": "f(x,0)=1", "x": num}));
        require(f(&x, 1) == zero, json!({"identity": "f(x,1)=0", "x": num}));
    }
    for j in 1..=9u32 {
        require(f(&zero, j) == zero, json!({"identity": "f(0,j)=0", "j": j}));
        require(f(&one, j) == zero, json!({"identity": "f(1,j)=0", "j": j}));
    }
    for num in 1..100i64 {
        let x = exact(num, 100);
        let mirror = exact(100 - num, 100);
        for j in [2u32, 4, 6, 8] {
            require(f(&x, j) > zero, json!({"identity": "even positivity", "x": num, "j": j}));
            require(
                f(&x, j) == f(&mirror, j),
                json!({"identity": "even symmetry", "x": num, "j": j}),
            );
        }
        for j in [3u32, 5, 7, 9] {
            require(
                f(&x, j) == -f(&mirror, j),
                json!({"identity": "odd antisymmetry", "x": num, "j": j}),
            );
            if num < 50 {
                require(f(&x, j) > zero, json!({"identity": "odd sign below 1/2", "x": num, "j": j}));
            } else if num == 50 {
                require(f(&x, j) == zero, json!({"identity": "odd zero at 1/2", "j": j}));
            } else {
                require(f(&x, j) < zero, json!({"identity": "odd sign above 1/2", "x": num, "j": j}));
            }
        }
    }
    Ok(report)
}

/// Geometric-mean inequality `f(x,r-1) f(x,r+1) > f(x,r)^2` on a grid of
/// interior points, plus strict monotonicity of the three-term embracing
/// function along dense `y` grids, by finite differences.
pub fn check_embracing_and_geometric() -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "embracing-geometric",
        "odd r,s in {3,5,7}; x grid 1/100 on (0,1); y grids 0..5 step 1/10 with finite-difference step 1e-4".into(),
        0,
    );
    let mut samples = 0usize;
    // geometric-mean inequality, exact arithmetic
    for r in [3u32, 5, 7] {
        for num in 1..100i64 {
            let x = Scalar::from_ratio(num, 100, Mode::Exact);
            let lhs = f(&x, r - 1) * f(&x, r + 1);
            let rhs = f(&x, r).powi(2);
            samples += 1;
            report.observe_margin((&lhs - &rhs).to_f64());
            if lhs <= rhs {
                report.fail(json!({
                    "case": "geometric-mean",
                    "r": r,
                    "x": format!("{num}/100"),
                }));
            }
        }
    }
    // embracing monotonicity by finite differences; alpha * beta >= 1/2
    // throughout, including one pair exactly on the boundary
    let params: Vec<(f64, f64, f64, f64, f64)> = vec![
        (0.3, 0.7, 1.0, 1.0, 1.0),
        (0.1, 0.9, 2.0, 1.0, 1.0),
        (0.25, 0.6, 1.0, 0.5, 1.0),
        (0.4, 0.55, 3.0, 0.75, 0.75),
        (0.2, 0.8, 1.0, 5.0, 0.1),
    ];
    let h = 1e-4;
    for r in [3u32, 5, 7] {
        for s in [3u32, 5, 7] {
            for &(p, q, w, alpha, beta) in &params {
                for step in 0..=50 {
                    let y = step as f64 * 0.1;
                    let eval = |yy: f64| -> Result<f64> {
                        Ok(embracing_f(
                            r,
                            s,
                            &Scalar::Float(p),
                            &Scalar::Float(q),
                            &Scalar::Float(w),
                            &Scalar::Float(alpha),
                            &Scalar::Float(beta),
                            &Scalar::Float(yy),
                        )?
                        .to_f64())
                    };
                    let fy = eval(y)?;
                    let fyh = eval(y + h)?;
                    let slope = (fyh - fy) / h;
                    // margin scales with the local magnitude of F; near the
                    // origin all terms carry positive powers of y, so both F
                    // and the admissible slope floor shrink together
                    let margin = 1e-12 * fy.abs().max(fyh.abs());
                    samples += 1;
                    report.observe_margin(slope - margin);
                    if slope <= margin {
                        report.fail(json!({
                            "case": "embracing-slope",
                            "r": r, "s": s, "p": p, "q": q, "w": w,
                            "alpha": alpha, "beta": beta, "y": y,
                            "slope": slope,
                        }));
                    }
                }
            }
        }
    }
    report.samples = samples;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Crawford nonexistence and the appendix counterexample
// ---------------------------------------------------------------------------

/// Full nonexistence sweep for the Crawford game: no pure equilibrium, empty
/// exhaustive support enumeration, explicit failure of the
/// equal-expectation-forced candidate `<2/3, 1/3>`, and an empty grid scan.
pub fn check_crawford_nonexistence(
    spec: &ValuationSpec,
    delta: &Scalar,
    resolution: f64,
    tol: f64,
) -> Result<PropertyReport> {
    let g = crawford(delta)?;
    let mode = g.mode();
    let mut report = PropertyReport::new(
        "crawford-nonexistence",
        format!(
            "delta={delta}, pure + support enumeration + forced candidate + grid step {resolution}"
        ),
        0,
    );
    let pure = pure_equilibria(spec, &g, tol, DEFAULT_PURE_BUDGET)?;
    if !(pure.found.is_empty() && pure.exhausted) {
        report.fail(json!({"stage": "pure", "found": pure.found.len()}));
    }
    let sup = support_enumeration_2p(spec, &g, tol, DEFAULT_SUPPORT_PAIR_CAP)?;
    if !(sup.found.is_empty() && sup.exhausted) {
        report.fail(json!({
            "stage": "support-enumeration",
            "found": sup.found.iter().map(|r| r.profile.to_string()).collect::<Vec<_>>(),
        }));
    }
    // the candidate every equal-expectation argument pins down
    let candidate = MixedProfile::new(vec![
        vec![Scalar::from_ratio(2, 3, mode), Scalar::from_ratio(1, 3, mode)],
        vec![Scalar::from_ratio(2, 3, mode), Scalar::from_ratio(1, 3, mode)],
    ]);
    let forced = verify(spec, &g, &candidate, tol)?;
    match forced.verdict {
        crate::equilibrium::Verdict::Equilibrium => {
            report.fail(json!({"stage": "forced-candidate", "verdict": "equilibrium"}));
        }
        crate::equilibrium::Verdict::Violated { player, strategy } => {
            let slack = forced.players[player].slack.to_f64();
            report.observe_margin(-slack);
            report.domain.push_str(&format!(
                "; forced candidate improved by player {player} moving to strategy {strategy} (gain {:.6})",
                -slack
            ));
        }
    }
    let grid = grid_search(spec, &g, resolution, tol, DEFAULT_GRID_BUDGET, &[])?;
    if !grid.found.is_empty() {
        report.fail(json!({
            "stage": "grid",
            "found": grid.found.iter().map(|r| r.profile.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(report)
}

/// Exact-mode checks of the appendix game: equal expectations and second
/// moments on both pure rows, distinct payoff distributions, and a constant
/// `E - Var` payoff valuation along the mixing segment.
pub fn check_fp_counterexample() -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "fp-counterexample",
        "appendix two-row game at the fixed column mix; lambda grid 1/10".into(),
        11,
    );
    let fp = fp_counterexample();
    let exact = |p: i64, q: i64| Scalar::from_ratio(p, q, Mode::Exact);
    // payoff-space quantities from the negated-cost storage
    let payoff_value = |mix: Vec<Scalar>| -> Result<(Scalar, Scalar, Scalar)> {
        let p = fp.profile(mix);
        let e_cost = expectation(&fp.game, 0, &p)?;
        let var = k_moment(&fp.game, 0, &p, 2)?;
        let e_payoff = -&e_cost;
        let v = &e_payoff - &var;
        Ok((e_payoff, CostSource::raw_power_mean(&fp.game, 0, &p, 2), v))
    };
    let (e1, m1, v1) = payoff_value(vec![exact(1, 1), exact(0, 1)])?;
    let (e2, m2, v2) = payoff_value(vec![exact(0, 1), exact(1, 1)])?;
    if e1 != exact(2, 1) || e2 != exact(2, 1) {
        report.fail(json!({"case": "expectation", "first": e1.to_f64(), "second": e2.to_f64()}));
    }
    if m1 != exact(65, 8) || m2 != exact(65, 8) {
        report.fail(json!({"case": "second-moment", "first": m1.to_f64(), "second": m2.to_f64()}));
    }
    if fp.payoffs[0] == fp.payoffs[1] {
        report.fail(json!({"case": "distributions", "detail": "rows induce identical payoffs"}));
    }
    for lambda in 1..10i64 {
        let l = exact(lambda, 10);
        let (_, _, v) = payoff_value(vec![l.clone(), exact(1, 1) - &l])?;
        if v != v1 || v != v2 {
            report.fail(json!({
                "case": "segment-constancy",
                "lambda": format!("{lambda}/10"),
                "value": v.to_f64(),
            }));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Moment-formula oracle equivalence
// ---------------------------------------------------------------------------

/// Pits the scheduling moment formula against the definitional moment on
/// random two-link games, exact arithmetic end to end.
pub fn check_moment_formula_oracle(games: usize, seed: u64) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        "moment-formula-oracle",
        format!(
            "{games} random scheduling games, n <= 4, m = 2, weights <= 5, k in {{0,1,2,4,6,8}}"
        ),
        games,
    )
    .seeded(seed);
    let mut rng = rng_from(seed);
    for idx in 0..games {
        let n = rand::Rng::gen_range(&mut rng, 2..=4usize);
        let g = random_two_link_game(&mut rng, n, 5);
        let nf = g.to_normal_form(Mode::Exact)?;
        let p = random_mixed_profile(&mut rng, &vec![2; n], Mode::Exact, 8);
        let i = rand::Rng::gen_range(&mut rng, 0..n);
        for link in 0..2 {
            let pinned = p.with_pure_player(i, link, Mode::Exact);
            for k in [0u32, 1, 2, 4, 6, 8] {
                let formula = k_moment_formula(&g, i, link, &p, k)?;
                let oracle = k_moment(&nf, i, &pinned, k)?;
                if formula != oracle {
                    report.fail(json!({
                        "game": idx,
                        "omega": g.omega,
                        "profile": p,
                        "player": i,
                        "link": link,
                        "k": k,
                        "formula": formula.to_f64(),
                        "oracle": oracle.to_f64(),
                    }));
                }
            }
        }
    }
    Ok(report)
}

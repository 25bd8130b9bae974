//! Equilibrium verification and search.
//!
//! Every supported valuation is concave in a player's own mixed strategy, so
//! the minimum over the strategy simplex is attained at a vertex: a profile
//! is an equilibrium exactly when no player has an improving *pure*
//! deviation. Verification therefore needs only `n * (1 + sum |S_i|)`
//! valuation evaluations.
//!
//! Searches:
//! - [`pure_equilibria`]: exhaustive best-response scan of pure profiles.
//! - [`support_enumeration_2p`]: for two players, enumerates support pairs
//!   and solves the equal-conditional-expectation systems that any best
//!   response must satisfy (the Weak-Equilibrium-for-Expectation property),
//!   then filters candidates through [`verify`].
//! - [`grid_search`]: dense probability grid for n-player two-strategy
//!   games; reports coverage honestly and never claims nonexistence.
//! - [`best_response_dynamics`]: deterministic pure improvement walk with
//!   cycle detection.

use std::collections::{BTreeMap, HashMap, HashSet};

use num::{BigRational, One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{support, Game, MixedProfile, PureProfile};
use crate::linalg::{solve, solve_on_basis, LinearSolution};
use crate::scalar::{Mode, Scalar};
use crate::valuation::{valuation_on, value_at_pure_cost, CostSource, ValuationSpec};

/// Default cap on support pairs examined by [`support_enumeration_2p`].
pub const DEFAULT_SUPPORT_PAIR_CAP: usize = 1 << 20;
/// Default cap on grid points examined by [`grid_search`].
pub const DEFAULT_GRID_BUDGET: usize = 4_000_000;
/// Default cap on pure profiles examined by [`pure_equilibria`].
pub const DEFAULT_PURE_BUDGET: usize = 1 << 21;
/// Cap on basic feasible solutions enumerated per degenerate support pair.
pub const VERTEX_CAP: usize = 64;

/// Per-player outcome of a verification.
#[derive(Clone, Debug, Serialize)]
pub struct PlayerAssessment {
    pub value: Scalar,
    pub best_deviation: usize,
    pub best_deviation_value: Scalar,
    /// `best_deviation_value - value`; nonnegative (within tolerance) at an
    /// equilibrium.
    pub slack: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Verdict {
    Equilibrium,
    Violated { player: usize, strategy: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct EquilibriumReport {
    pub profile: MixedProfile,
    pub players: Vec<PlayerAssessment>,
    pub verdict: Verdict,
    pub mode: Mode,
    pub tol: f64,
}

impl EquilibriumReport {
    pub fn is_equilibrium(&self) -> bool {
        self.verdict == Verdict::Equilibrium
    }
}

/// Result of a search: verified equilibria plus an honest description of the
/// candidate space that was covered.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub found: Vec<EquilibriumReport>,
    pub exhausted: bool,
    pub candidate_space: String,
}

/// Checks whether `p` is a `spec`-equilibrium by testing every pure
/// deviation of every player.
pub fn verify<S: CostSource + ?Sized>(
    spec: &ValuationSpec,
    src: &S,
    p: &MixedProfile,
    tol: f64,
) -> Result<EquilibriumReport> {
    let mode = src.mode();
    p.validate(&src.strategy_counts(), mode, crate::game::mode_tol(mode, tol))?;
    let mut players = Vec::with_capacity(src.num_players());
    let mut verdict = Verdict::Equilibrium;
    for i in 0..src.num_players() {
        let value = valuation_on(spec, src, i, p)?;
        let mut best: Option<(usize, Scalar)> = None;
        for s in 0..src.num_strategies(i) {
            let dev = p.with_pure_player(i, s, mode);
            let dev_value = valuation_on(spec, src, i, &dev)?;
            if best.as_ref().map_or(true, |(_, v)| dev_value < *v) {
                best = Some((s, dev_value));
            }
        }
        let (best_deviation, best_deviation_value) = best.expect("nonempty strategy set");
        let slack = &best_deviation_value - &value;
        if verdict == Verdict::Equilibrium && !slack.is_nonnegative_tol(tol) {
            verdict = Verdict::Violated { player: i, strategy: best_deviation };
        }
        players.push(PlayerAssessment { value, best_deviation, best_deviation_value, slack });
    }
    Ok(EquilibriumReport { profile: p.clone(), players, verdict, mode, tol })
}

/// Exhaustive scan of pure profiles. At a pure profile every supported
/// valuation collapses to (a scaling of) the cost table, so this reduces to
/// best-response checks on pure costs.
pub fn pure_equilibria<S: CostSource + ?Sized>(
    spec: &ValuationSpec,
    src: &S,
    tol: f64,
    budget: usize,
) -> Result<SearchResult> {
    let counts = src.strategy_counts();
    let total: usize = counts.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m)).ok_or_else(
        || Error::BudgetExceeded("pure profile count overflows".into()),
    )?;
    if total > budget {
        return Err(Error::BudgetExceeded(format!(
            "{total} pure profiles exceed budget {budget}"
        )));
    }
    let mode = src.mode();
    let n = counts.len();
    let mut found = Vec::new();
    let mut profile = vec![0usize; n];
    'outer: for flat in 0..total {
        let mut rest = flat;
        for i in (0..n).rev() {
            profile[i] = rest % counts[i];
            rest /= counts[i];
        }
        for i in 0..n {
            let current = value_at_pure_cost(spec, &src.pure_cost(i, &profile));
            let mut deviation = profile.clone();
            for s in 0..counts[i] {
                if s == profile[i] {
                    continue;
                }
                deviation[i] = s;
                let dev = value_at_pure_cost(spec, &src.pure_cost(i, &deviation));
                if !(&dev - &current).is_nonnegative_tol(tol) {
                    continue 'outer;
                }
            }
        }
        let mixed = MixedProfile::pure(&counts, &profile, mode);
        let report = verify(spec, src, &mixed, tol)?;
        debug_assert!(report.is_equilibrium());
        found.push(report);
    }
    Ok(SearchResult {
        found,
        exhausted: true,
        candidate_space: format!("all {total} pure profiles"),
    })
}

/// Per-player maximum gap between conditional expectations of supported
/// strategies; zero exactly when the profile has the
/// Weak-Equilibrium-for-Expectation property for every player.
pub fn wee_residual<S: CostSource + ?Sized>(
    src: &S,
    p: &MixedProfile,
    tol: f64,
) -> Result<Vec<Scalar>> {
    let mode = src.mode();
    p.validate(&src.strategy_counts(), mode, crate::game::mode_tol(mode, tol))?;
    let sup = support(p, tol);
    let mut out = Vec::with_capacity(src.num_players());
    for i in 0..src.num_players() {
        let mut lo: Option<Scalar> = None;
        let mut hi: Option<Scalar> = None;
        for &s in &sup.0[i] {
            let dev = p.with_pure_player(i, s, mode);
            let e = src.expectation(i, &dev);
            if lo.as_ref().map_or(true, |v| e < *v) {
                lo = Some(e.clone());
            }
            if hi.as_ref().map_or(true, |v| e > *v) {
                hi = Some(e);
            }
        }
        out.push(match (lo, hi) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => Scalar::zero(mode),
        });
    }
    Ok(out)
}

/// Candidate distributions over one player's support satisfying the
/// equal-conditional-expectation equations forced by the opponent's support.
///
/// `diff_rows` are the equation coefficient rows (one per anchored strategy
/// pair), columns indexed by the support entries; the simplex row is added
/// here. Returns strictly positive solutions on the full support: vertices of
/// degenerate systems reappear at their own (smaller) support pair, so only
/// full-support candidates matter at this one, plus the vertex centroid as an
/// interior sample of degenerate polytopes.
fn wee_candidates(diff_rows: &[Vec<BigRational>], width: usize) -> Vec<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(diff_rows.len() + 1);
    a.push(vec![BigRational::one(); width]);
    a.extend(diff_rows.iter().cloned());
    let mut b = vec![BigRational::zero(); a.len()];
    b[0] = BigRational::one();

    let strictly_positive = |x: &Vec<BigRational>| x.iter().all(|v| v.is_positive());
    match solve(&a, &b) {
        LinearSolution::Infeasible => Vec::new(),
        LinearSolution::Unique(x) => {
            if strictly_positive(&x) {
                vec![x]
            } else {
                Vec::new()
            }
        }
        LinearSolution::Underdetermined { rank } => {
            // Basic feasible solutions: pick `rank` support columns, zero the
            // rest, keep nonnegative solves.
            let mut vertices: Vec<Vec<BigRational>> = Vec::new();
            let mut seen: HashSet<String> = HashSet::new();
            let mut basis: Vec<usize> = (0..rank).collect();
            loop {
                if let Some(x) = solve_on_basis(&a, &b, &basis, width) {
                    if x.iter().all(|v| !v.is_negative()) {
                        let key = key_of(&x);
                        if seen.insert(key) {
                            vertices.push(x);
                        }
                    }
                }
                if vertices.len() >= VERTEX_CAP || !next_subset(&mut basis, width) {
                    break;
                }
            }
            if vertices.is_empty() {
                return Vec::new();
            }
            let count = BigRational::from_integer(num::BigInt::from(vertices.len() as i64));
            let mut centroid = vec![BigRational::zero(); width];
            for v in &vertices {
                for (c, value) in centroid.iter_mut().zip(v) {
                    *c = &*c + value;
                }
            }
            for c in centroid.iter_mut() {
                *c = &*c / &count;
            }
            let mut out: Vec<Vec<BigRational>> =
                vertices.into_iter().filter(strictly_positive).collect();
            if strictly_positive(&centroid) {
                let key = key_of(&centroid);
                if out.iter().all(|v| key_of(v) != key) {
                    out.push(centroid);
                }
            }
            out
        }
    }
}

fn key_of(x: &[BigRational]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Advances `basis` to the lexicographically next size-k subset of `0..n`.
fn next_subset(basis: &mut [usize], n: usize) -> bool {
    let k = basis.len();
    if k == 0 {
        return false;
    }
    let mut i = k;
    while i > 0 {
        i -= 1;
        if basis[i] < n - (k - i) {
            basis[i] += 1;
            for j in i + 1..k {
                basis[j] = basis[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Sign masks for quick infeasibility pruning: for strategies `a != b` of the
/// row player, over which opponent columns is `cost(a, t) - cost(b, t)`
/// positive / negative.
struct SignMasks {
    pos: Vec<Vec<u64>>,
    neg: Vec<Vec<u64>>,
}

fn sign_masks(costs: &[Vec<BigRational>]) -> SignMasks {
    let rows = costs.len();
    let cols = costs[0].len();
    let mut pos = vec![vec![0u64; rows]; rows];
    let mut neg = vec![vec![0u64; rows]; rows];
    for a in 0..rows {
        for b in 0..rows {
            if a == b {
                continue;
            }
            for t in 0..cols {
                let d = &costs[a][t] - &costs[b][t];
                if d.is_positive() {
                    pos[a][b] |= 1 << t;
                } else if d.is_negative() {
                    neg[a][b] |= 1 << t;
                }
            }
        }
    }
    SignMasks { pos, neg }
}

/// True when some anchored pair in `own_support` has strictly one-sided cost
/// differences over `opp_mask`, which makes the equal-expectation system
/// infeasible over nonnegative distributions.
fn prune_infeasible(masks: &SignMasks, own_support: &[usize], opp_mask: u64) -> bool {
    for (idx, &a) in own_support.iter().enumerate() {
        for &b in &own_support[idx + 1..] {
            let p = masks.pos[a][b] & opp_mask;
            let n = masks.neg[a][b] & opp_mask;
            if (p == 0) != (n == 0) {
                return true;
            }
        }
    }
    false
}

/// Two-player equilibrium search by support enumeration.
///
/// For each support pair, any equilibrium must equalize each player's
/// conditional expectations across their own support (the
/// Weak-Equilibrium-for-Expectation property), which is linear in the
/// opponent's probabilities and solved exactly over rationals. Candidates
/// are filtered through [`verify`] in the game's arithmetic mode.
pub fn support_enumeration_2p(
    spec: &ValuationSpec,
    g: &Game,
    tol: f64,
    pair_cap: usize,
) -> Result<SearchResult> {
    if g.num_players() != 2 {
        return Err(Error::InvalidParameter(format!(
            "support enumeration needs a 2-player game, got {} players",
            g.num_players()
        )));
    }
    let (m1, m2) = (g.num_strategies(0), g.num_strategies(1));
    if m1 > 63 || m2 > 63 {
        return Err(Error::BudgetExceeded(
            "support enumeration is limited to 63 strategies per player".into(),
        ));
    }
    let total_pairs = ((1usize << m1) - 1) * ((1usize << m2) - 1);
    if total_pairs > pair_cap {
        return Err(Error::BudgetExceeded(format!(
            "{total_pairs} support pairs exceed cap {pair_cap}"
        )));
    }

    // cost tables as exact rationals (finite floats are rationals too)
    let costs1: Vec<Vec<BigRational>> = (0..m1)
        .map(|a| (0..m2).map(|t| g.cost(0, &[a, t]).to_rational()).collect())
        .collect();
    let costs2t: Vec<Vec<BigRational>> = (0..m2)
        .map(|t| (0..m1).map(|s| g.cost(1, &[s, t]).to_rational()).collect())
        .collect();
    let masks1 = sign_masks(&costs1); // rows: player 1 strategies, cols: player 2
    let masks2 = sign_masks(&costs2t); // rows: player 2 strategies, cols: player 1

    let mode = g.mode();
    let supports1: Vec<Vec<usize>> = (1u64..1 << m1)
        .map(|mask| (0..m1).filter(|s| mask >> s & 1 == 1).collect())
        .collect();
    let supports2: Vec<Vec<usize>> = (1u64..1 << m2)
        .map(|mask| (0..m2).filter(|s| mask >> s & 1 == 1).collect())
        .collect();

    let pairs: Vec<(usize, usize)> = (0..supports1.len())
        .flat_map(|i| (0..supports2.len()).map(move |j| (i, j)))
        .collect();

    let candidate_sets: Vec<Vec<MixedProfile>> = pairs
        .par_iter()
        .map(|&(i1, i2)| {
            let t1 = &supports1[i1];
            let t2 = &supports2[i2];
            let mask1 = (i1 as u64) + 1;
            let mask2 = (i2 as u64) + 1;
            if prune_infeasible(&masks1, t1, mask2) || prune_infeasible(&masks2, t2, mask1) {
                return Vec::new();
            }
            // player 2's distribution equalizes player 1's expectations
            let rows_p2: Vec<Vec<BigRational>> = t1[1..]
                .iter()
                .map(|&a| {
                    t2.iter()
                        .map(|&t| &costs1[t1[0]][t] - &costs1[a][t])
                        .collect()
                })
                .collect();
            let cand_p2 = wee_candidates(&rows_p2, t2.len());
            if cand_p2.is_empty() {
                return Vec::new();
            }
            let rows_p1: Vec<Vec<BigRational>> = t2[1..]
                .iter()
                .map(|&t| {
                    t1.iter()
                        .map(|&s| &costs2t[t2[0]][s] - &costs2t[t][s])
                        .collect()
                })
                .collect();
            let cand_p1 = wee_candidates(&rows_p1, t1.len());
            let mut out = Vec::new();
            for q1 in &cand_p1 {
                for q2 in &cand_p2 {
                    let assemble = |support: &[usize], values: &[BigRational], m: usize| {
                        let mut probs = vec![Scalar::zero(mode); m];
                        for (&s, v) in support.iter().zip(values) {
                            probs[s] = Scalar::from_rational(v, mode);
                        }
                        probs
                    };
                    out.push(MixedProfile::new(vec![
                        assemble(t1, q1, m1),
                        assemble(t2, q2, m2),
                    ]));
                }
            }
            out
        })
        .collect();

    let mut seen: HashSet<String> = HashSet::new();
    let mut found = Vec::new();
    for candidate in candidate_sets.into_iter().flatten() {
        let key = format!("{candidate}");
        if !seen.insert(key) {
            continue;
        }
        let report = verify(spec, g, &candidate, tol)?;
        if report.is_equilibrium() {
            found.push(report);
        }
    }
    sort_reports(&mut found);
    Ok(SearchResult {
        found,
        exhausted: true,
        candidate_space: format!(
            "{total_pairs} support pairs; equal-expectation systems solved exactly, \
             degenerate systems sampled at basic solutions (cap {VERTEX_CAP}) plus centroid"
        ),
    })
}

/// Dense grid search over `[0,1]^n` for games where every player has exactly
/// two strategies. `resolution` is the grid step; every grid profile (and
/// every seeded extra candidate) is run through [`verify`]. Finding nothing
/// is a statement about the grid, not a nonexistence proof.
pub fn grid_search<S: CostSource + Sync + ?Sized>(
    spec: &ValuationSpec,
    src: &S,
    resolution: f64,
    tol: f64,
    budget: usize,
    seeds: &[MixedProfile],
) -> Result<SearchResult> {
    let n = src.num_players();
    let counts = src.strategy_counts();
    if counts.iter().any(|&m| m != 2) {
        return Err(Error::InvalidParameter(
            "grid search needs exactly two strategies per player".into(),
        ));
    }
    if !(resolution > 0.0 && resolution <= 1.0) {
        return Err(Error::InvalidParameter(format!("bad grid resolution {resolution}")));
    }
    let steps = (1.0 / resolution).round() as usize;
    let per_player = steps + 1;
    let total = per_player
        .checked_pow(n as u32)
        .filter(|&t| t <= budget)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "grid of {per_player}^{n} points exceeds budget {budget}"
            ))
        })?;
    let mode = src.mode();
    let point = |k: usize| -> (Scalar, Scalar) {
        (
            Scalar::from_ratio(k as i64, steps as i64, mode),
            Scalar::from_ratio((steps - k) as i64, steps as i64, mode),
        )
    };

    let chunk = 8192usize;
    let chunks: Vec<usize> = (0..total.div_ceil(chunk)).collect();
    let results: Result<Vec<Vec<EquilibriumReport>>> = chunks
        .par_iter()
        .map(|&c| {
            let mut local = Vec::new();
            for flat in c * chunk..((c + 1) * chunk).min(total) {
                let mut rest = flat;
                let mut strategies = Vec::with_capacity(n);
                for _ in 0..n {
                    let k = rest % per_player;
                    rest /= per_player;
                    let (p1, p0) = point(k);
                    strategies.push(vec![p1, p0]);
                }
                let profile = MixedProfile::new(strategies);
                let report = verify(spec, src, &profile, tol)?;
                if report.is_equilibrium() {
                    local.push(report);
                }
            }
            Ok(local)
        })
        .collect();
    let mut found: Vec<EquilibriumReport> = results?.into_iter().flatten().collect();
    for seed in seeds {
        let report = verify(spec, src, seed, tol)?;
        if report.is_equilibrium() {
            found.push(report);
        }
    }
    sort_reports(&mut found);
    Ok(SearchResult {
        found,
        exhausted: true,
        candidate_space: format!(
            "probability grid with step 1/{steps} over [0,1]^{n} ({total} points){}",
            if seeds.is_empty() { String::new() } else { format!(" plus {} seeded candidates", seeds.len()) }
        ),
    })
}

fn sort_reports(reports: &mut [EquilibriumReport]) {
    reports.sort_by_key(|r| format!("{}", r.profile));
}

/// Outcome of a best-response improvement walk.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynamicsOutcome {
    Converged { profile: PureProfile, steps: usize },
    Cycle { cycle: Vec<PureProfile> },
    Unknown { steps: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsReport {
    pub outcome: DynamicsOutcome,
    pub path: Vec<PureProfile>,
}

/// Follows strict best pure-response improvements from a pure profile.
/// The lowest-indexed player with a strict improvement moves to her best
/// deviation (ties broken towards the lowest strategy index), so runs are
/// reproducible; revisiting a profile reports the cycle.
pub fn best_response_dynamics<S: CostSource + ?Sized>(
    spec: &ValuationSpec,
    src: &S,
    start: &[usize],
    max_steps: usize,
) -> Result<DynamicsReport> {
    let counts = src.strategy_counts();
    if start.len() != counts.len() || start.iter().zip(&counts).any(|(&s, &m)| s >= m) {
        return Err(Error::DimensionMismatch("bad starting profile".into()));
    }
    let mut current: PureProfile = start.to_vec();
    let mut path = vec![current.clone()];
    let mut visited: HashMap<PureProfile, usize> = HashMap::new();
    visited.insert(current.clone(), 0);
    for step in 0..max_steps {
        let mut mover: Option<(usize, usize)> = None;
        for i in 0..counts.len() {
            let here = value_at_pure_cost(spec, &src.pure_cost(i, &current));
            let mut best: Option<(usize, Scalar)> = None;
            let mut deviation = current.clone();
            for s in 0..counts[i] {
                if s == current[i] {
                    continue;
                }
                deviation[i] = s;
                let v = value_at_pure_cost(spec, &src.pure_cost(i, &deviation));
                if v < here && best.as_ref().map_or(true, |(_, bv)| v < *bv) {
                    best = Some((s, v));
                }
            }
            if let Some((s, _)) = best {
                mover = Some((i, s));
                break;
            }
        }
        let Some((player, strategy)) = mover else {
            return Ok(DynamicsReport {
                outcome: DynamicsOutcome::Converged { profile: current, steps: step },
                path,
            });
        };
        current[player] = strategy;
        if let Some(&first) = visited.get(&current) {
            let cycle = path[first..].to_vec();
            path.push(current);
            return Ok(DynamicsReport { outcome: DynamicsOutcome::Cycle { cycle }, path });
        }
        visited.insert(current.clone(), path.len());
        path.push(current.clone());
    }
    Ok(DynamicsReport { outcome: DynamicsOutcome::Unknown { steps: max_steps }, path })
}

/// Groups reports per verdict for compact JSON output.
pub fn summarize_residuals(residuals: &[Scalar]) -> BTreeMap<String, String> {
    residuals
        .iter()
        .enumerate()
        .map(|(i, r)| (format!("player{i}"), r.to_string()))
        .collect()
}

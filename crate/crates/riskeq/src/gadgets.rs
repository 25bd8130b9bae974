//! Gadget games and reductions: the Crawford game, the SAT game, the
//! 3-DIMENSIONAL MATCHING -> MULTIBALANCED PARTITION -> scheduling chain with
//! equilibrium lifting, delta-threshold selection, and the appendix
//! counterexample game.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::equilibrium::{verify, EquilibriumReport};
use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::scalar::{big_ratio, ceil_sqrt, Mode, Scalar};
use crate::scheduling::SchedulingGame;
use crate::valuation::{two_value_r, TwoValueDist, ValuationSpec};

// ---------------------------------------------------------------------------
// Crawford game
// ---------------------------------------------------------------------------

/// The 2x2 Crawford game: a best-response cycle on two strategies with costs
/// `(f1,f1) -> <1+d, 1+d>`, `(f1,f2) = (f2,f1) -> <1, 1+2d>`,
/// `(f2,f2) -> <1+2d, 1>`.
pub fn crawford(delta: &Scalar) -> Result<Game> {
    let mode = delta.mode();
    let zero = Scalar::zero(mode);
    let one = Scalar::one(mode);
    if !delta.is_positive_tol(0.0) || !(&one - delta).is_positive_tol(0.0) {
        return Err(Error::InvalidParameter(format!(
            "crawford delta must lie in (0,1), got {delta}"
        )));
    }
    drop(zero);
    let d1 = &one + delta;
    let d2 = &one + &(Scalar::from_int(2, mode) * delta);
    let labels = vec!["crawford:f1".to_string(), "crawford:f2".to_string()];
    Game::bimatrix(
        labels.clone(),
        labels,
        vec![vec![d1.clone(), one.clone()], vec![one.clone(), d2.clone()]],
        vec![vec![d1, d2.clone()], vec![d2, one]],
    )
}

// ---------------------------------------------------------------------------
// CNF formulas and the SAT game
// ---------------------------------------------------------------------------

/// CNF formula over variables `1..=num_vars`; literals are signed indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<CnfFormula> {
        if clauses.is_empty() {
            return Err(Error::InvalidInstance("formula needs at least one clause".into()));
        }
        if num_vars == 0 {
            return Err(Error::InvalidInstance("formula needs at least one variable".into()));
        }
        for clause in &clauses {
            for &lit in clause {
                let var = lit.unsigned_abs() as usize;
                if lit == 0 || var > num_vars {
                    return Err(Error::InvalidInstance(format!(
                        "literal {lit} out of range for {num_vars} variables"
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Parses DIMACS CNF text.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
        let mut num_vars = None;
        let mut declared_clauses = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(Error::Parse(format!("bad DIMACS header {line:?}")));
                }
                num_vars = Some(
                    fields[1]
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad variable count: {e}")))?,
                );
                declared_clauses = Some(
                    fields[2]
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad clause count: {e}")))?,
                );
                continue;
            }
            for token in line.split_whitespace() {
                let lit: i32 = token
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad literal {token:?}: {e}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        if !current.is_empty() {
            clauses.push(current);
        }
        let num_vars = num_vars.ok_or_else(|| Error::Parse("missing DIMACS header".into()))?;
        if let Some(k) = declared_clauses {
            if k != clauses.len() {
                return Err(Error::Parse(format!(
                    "header declares {k} clauses, found {}",
                    clauses.len()
                )));
            }
        }
        CnfFormula::new(num_vars, clauses)
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Whether `assignment[v]` (0-based) satisfies every clause.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self.clauses.iter().all(|clause| {
                clause.iter().any(|&lit| {
                    let var = lit.unsigned_abs() as usize - 1;
                    assignment[var] == (lit > 0)
                })
            })
    }

    /// Exhaustive satisfiability check, for desk-scale instances only.
    pub fn solve_exhaustive(&self) -> Option<Vec<bool>> {
        assert!(self.num_vars <= 20, "exhaustive solver is for tiny formulas");
        (0..1u64 << self.num_vars)
            .map(|bits| (0..self.num_vars).map(|v| bits >> v & 1 == 1).collect::<Vec<bool>>())
            .find(|a| self.satisfied_by(a))
    }
}

/// Strategy layout of the SAT game: clauses, then variables, then literals
/// `+v1, -v1, +v2, ...`, then the two Crawford strategies.
#[derive(Clone, Copy, Debug)]
pub struct SatLayout {
    pub num_clauses: usize,
    pub num_vars: usize,
}

impl SatLayout {
    pub fn of(phi: &CnfFormula) -> SatLayout {
        SatLayout { num_clauses: phi.num_clauses(), num_vars: phi.num_vars }
    }

    pub fn num_strategies(&self) -> usize {
        self.num_clauses + 3 * self.num_vars + 2
    }

    pub fn clause(&self, c: usize) -> usize {
        c
    }

    pub fn var(&self, v: usize) -> usize {
        self.num_clauses + v
    }

    /// 0-based variable index, `positive` selects the unnegated literal.
    pub fn literal(&self, v: usize, positive: bool) -> usize {
        self.num_clauses + self.num_vars + 2 * v + usize::from(!positive)
    }

    pub fn crawford(&self, which: usize) -> usize {
        self.num_clauses + 3 * self.num_vars + which
    }

    fn kind(&self, s: usize) -> SatKind {
        if s < self.num_clauses {
            SatKind::Clause(s)
        } else if s < self.num_clauses + self.num_vars {
            SatKind::Var(s - self.num_clauses)
        } else if s < self.num_clauses + 3 * self.num_vars {
            let off = s - self.num_clauses - self.num_vars;
            SatKind::Lit { var: off / 2, positive: off % 2 == 0 }
        } else {
            SatKind::F(s - self.num_clauses - 3 * self.num_vars)
        }
    }

    fn label(&self, s: usize) -> String {
        match self.kind(s) {
            SatKind::Clause(c) => format!("clause:c{}", c + 1),
            SatKind::Var(v) => format!("var:v{}", v + 1),
            SatKind::Lit { var, positive } => {
                format!("lit:{}v{}", if positive { "+" } else { "-" }, var + 1)
            }
            SatKind::F(i) => format!("crawford:f{}", i + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SatKind {
    Clause(usize),
    Var(usize),
    Lit { var: usize, positive: bool },
    F(usize),
}

/// The SAT game together with its formula and strategy layout.
#[derive(Clone, Debug)]
pub struct SatGame {
    pub game: Game,
    pub formula: CnfFormula,
    pub layout: SatLayout,
    pub delta: BigRational,
}

/// Builds the two-player SAT game for `phi` with Crawford parameter `delta`
/// (required in `(0, 1/4]`). Strategy sets are `clauses + variables +
/// literals + {f1, f2}` per player; untabulated cells mirror the transposed
/// cell with the player roles swapped.
pub fn sat_game(phi: &CnfFormula, delta: &BigRational) -> Result<SatGame> {
    if !delta.is_positive() || delta > &big_ratio(1, 4) {
        return Err(Error::InvalidParameter(format!(
            "sat game delta must lie in (0, 1/4], got {delta}"
        )));
    }
    let layout = SatLayout::of(phi);
    let labels: Vec<String> = (0..layout.num_strategies()).map(|s| layout.label(s)).collect();
    let m = phi.num_vars as i64;
    let mode = Mode::Exact;
    let one = Scalar::one(mode);
    let two = Scalar::from_int(2, mode);
    let m_scalar = Scalar::from_int(m, mode);
    let zero = Scalar::zero(mode);
    let dd = Scalar::from_rational(delta, mode);
    let one_d = &one + &dd;
    let one_2d = &one + &(&two * &dd);

    // Tabulated cells; `None` falls through to the mirror rule.
    let table = |k1: SatKind, k2: SatKind| -> Option<(Scalar, Scalar)> {
        use SatKind::*;
        match (k1, k2) {
            (Lit { var: v1, positive: s1 }, Lit { var: v2, positive: s2 }) => {
                if v1 == v2 && s1 != s2 {
                    Some((two.clone(), two.clone()))
                } else {
                    Some((one.clone(), one.clone()))
                }
            }
            (Lit { var, .. }, Var(v)) => {
                let hit = var == v;
                Some((two.clone(), if hit { m_scalar.clone() } else { zero.clone() }))
            }
            (Lit { var, positive }, Clause(c)) => {
                let lit = if positive { var as i32 + 1 } else { -(var as i32 + 1) };
                let hit = phi.clauses[c].contains(&lit);
                Some((two.clone(), if hit { m_scalar.clone() } else { zero.clone() }))
            }
            (Lit { .. }, F(_)) => Some((two.clone(), one.clone())),
            (Var(_), Var(_)) | (Clause(_), Clause(_)) | (Var(_), Clause(_)) => {
                Some((two.clone(), two.clone()))
            }
            (Var(_), F(_)) | (Clause(_), F(_)) => Some((two.clone(), one.clone())),
            (F(0), F(0)) => Some((one_d.clone(), one_d.clone())),
            (F(0), F(1)) | (F(1), F(0)) => Some((one.clone(), one_2d.clone())),
            (F(1), F(1)) => Some((one_2d.clone(), one.clone())),
            _ => None,
        }
    };

    let game = Game::from_cost_fn(vec![labels.clone(), labels], |s| {
        let k1 = layout.kind(s[0]);
        let k2 = layout.kind(s[1]);
        let (c1, c2) = table(k1, k2)
            .or_else(|| table(k2, k1).map(|(a, b)| (b, a)))
            .expect("every cell is tabulated directly or by mirror");
        vec![c1, c2]
    })?;
    Ok(SatGame { game, formula: phi.clone(), layout, delta: delta.clone() })
}

/// Lifts a satisfying assignment to the mixed profile putting `1/m` on each
/// true literal for both players.
pub fn sat_assignment_to_profile(
    phi: &CnfFormula,
    assignment: &[bool],
    mode: Mode,
) -> Result<MixedProfile> {
    if !phi.satisfied_by(assignment) {
        return Err(Error::InvalidInstance(
            "assignment does not satisfy the formula".into(),
        ));
    }
    let layout = SatLayout::of(phi);
    let mut probs = vec![Scalar::zero(mode); layout.num_strategies()];
    let weight = Scalar::from_ratio(1, phi.num_vars as i64, mode);
    for (v, &value) in assignment.iter().enumerate() {
        probs[layout.literal(v, value)] = weight.clone();
    }
    Ok(MixedProfile::new(vec![probs.clone(), probs]))
}

// ---------------------------------------------------------------------------
// 3-DIMENSIONAL MATCHING and MULTIBALANCED PARTITION
// ---------------------------------------------------------------------------

/// 3-DIMENSIONAL MATCHING instance: triples over three disjoint `q`-element
/// coordinate sets, stored as 1-based index triples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TdmInstance {
    pub q: usize,
    pub triples: Vec<[usize; 3]>,
}

impl TdmInstance {
    pub fn new(q: usize, triples: Vec<[usize; 3]>) -> Result<TdmInstance> {
        if q == 0 || triples.is_empty() {
            return Err(Error::InvalidInstance("need q >= 1 and at least one triple".into()));
        }
        for t in &triples {
            if t.iter().any(|&x| x == 0 || x > q) {
                return Err(Error::InvalidInstance(format!(
                    "triple {t:?} out of range for q={q}"
                )));
            }
        }
        Ok(TdmInstance { q, triples })
    }

    /// Text format: first line `q`, then one `w x y` triple per line.
    pub fn parse(text: &str) -> Result<TdmInstance> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let q: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty 3DM input".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad q: {e}")))?;
        let mut triples = Vec::new();
        for line in lines {
            let idx: Vec<usize> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|e| Error::Parse(format!("bad index {t:?}: {e}"))))
                .collect::<Result<_>>()?;
            if idx.len() != 3 {
                return Err(Error::Parse(format!("expected three indices per line, got {line:?}")));
            }
            triples.push([idx[0], idx[1], idx[2]]);
        }
        TdmInstance::new(q, triples)
    }

    /// Whether the 1-based triple indices in `selection` form a matching.
    pub fn is_matching(&self, selection: &[usize]) -> bool {
        if selection.len() != self.q {
            return false;
        }
        let mut seen = [vec![], vec![], vec![]];
        for &i in selection {
            if i == 0 || i > self.triples.len() {
                return false;
            }
            let t = self.triples[i - 1];
            for c in 0..3 {
                if seen[c].contains(&t[c]) {
                    return false;
                }
                seen[c].push(t[c]);
            }
        }
        true
    }

    /// Exhaustive matching search for tiny instances.
    pub fn solve_exhaustive(&self) -> Option<Vec<usize>> {
        assert!(self.triples.len() <= 20, "exhaustive matcher is for tiny instances");
        let k = self.triples.len();
        (0u32..1 << k)
            .filter(|bits| bits.count_ones() as usize == self.q)
            .map(|bits| (1..=k).filter(|i| bits >> (i - 1) & 1 == 1).collect::<Vec<usize>>())
            .find(|sel| self.is_matching(sel))
    }
}

/// MULTIBALANCED PARTITION instance: nonnegative integer matrix `a[i][j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbpInstance {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<u64>>,
}

impl MbpInstance {
    pub fn new(a: Vec<Vec<u64>>) -> Result<MbpInstance> {
        let n = a.len();
        if n == 0 || a[0].is_empty() {
            return Err(Error::InvalidInstance("matrix must be nonempty".into()));
        }
        let m = a[0].len();
        if a.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidInstance("ragged matrix".into()));
        }
        Ok(MbpInstance { n, m, a })
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<MbpInstance> {
        let raw: MbpInstance = serde_json::from_value(v.clone())?;
        let inst = MbpInstance::new(raw.a)?;
        if inst.n != raw.n || inst.m != raw.m {
            return Err(Error::InvalidInstance("declared dimensions disagree with matrix".into()));
        }
        Ok(inst)
    }

    /// Exhaustive solution search for tiny instances (0-based row subsets).
    pub fn solve_exhaustive(&self) -> Option<Vec<usize>> {
        assert!(self.n <= 20, "exhaustive search is for tiny instances");
        (0u32..1 << self.n)
            .map(|bits| (0..self.n).filter(|i| bits >> i & 1 == 1).collect::<Vec<usize>>())
            .find(|subset| mbp_verify(self, subset))
    }
}

/// Column balance check: for every column `j`,
/// `sum_{i in I} a_ij = 3 + 2 sum_{i not in I} a_ij`.
pub fn mbp_verify(inst: &MbpInstance, subset: &[usize]) -> bool {
    if subset.iter().any(|&i| i >= inst.n) {
        return false;
    }
    (0..inst.m).all(|j| {
        let mut inside = 0u64;
        let mut outside = 0u64;
        for i in 0..inst.n {
            if subset.contains(&i) {
                inside += inst.a[i][j];
            } else {
                outside += inst.a[i][j];
            }
        }
        inside == 3 + 2 * outside
    })
}

/// Reduction from 3-DIMENSIONAL MATCHING: one indicator row per triple
/// (three ones, one per coordinate block), plus a final row of doubled
/// column sums.
pub fn tdm_to_mbp(t: &TdmInstance) -> MbpInstance {
    let k = t.triples.len();
    let q = t.q;
    let m = 3 * q;
    let mut a = vec![vec![0u64; m]; k + 1];
    for (i, triple) in t.triples.iter().enumerate() {
        a[i][triple[0] - 1] = 1;
        a[i][q + triple[1] - 1] = 1;
        a[i][2 * q + triple[2] - 1] = 1;
    }
    for j in 0..m {
        let b: u64 = (0..k).map(|i| a[i][j]).sum();
        a[k][j] = 2 * b;
    }
    MbpInstance { n: k + 1, m, a }
}

/// Lifts a matching (1-based triple indices) to an MBP solution (0-based
/// rows): the selected triples plus the final doubled row.
pub fn tdm_matching_to_mbp_solution(t: &TdmInstance, matching: &[usize]) -> Vec<usize> {
    let mut subset: Vec<usize> = matching.iter().map(|&i| i - 1).collect();
    subset.push(t.triples.len());
    subset.sort_unstable();
    subset
}

// ---------------------------------------------------------------------------
// MBP -> scheduling reduction
// ---------------------------------------------------------------------------

/// Player identities in the scheduling game produced by [`mbp_to_scheduling`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbpPlayer {
    /// Row `i` of the matrix; all-zero weights.
    Row(usize),
    /// Gadget player `[column, j]` with `j` in `0..5`.
    Gadget(usize, usize),
}

/// Scheduling game on two ordered links encoding an MBP instance, with
/// `n + 5m` players: the `n` rows plus a five-player gadget per column.
#[derive(Clone, Debug)]
pub struct MbpSchedulingGame {
    pub game: SchedulingGame,
    pub inst: MbpInstance,
    /// Weight scale: the padded maximum column sum, at least 4.
    pub big_m: u64,
}

impl MbpSchedulingGame {
    pub fn num_players(&self) -> usize {
        self.inst.n + 5 * self.inst.m
    }

    pub fn player_index(&self, p: MbpPlayer) -> usize {
        match p {
            MbpPlayer::Row(i) => i,
            MbpPlayer::Gadget(k, j) => self.inst.n + 5 * k + j,
        }
    }

    pub fn player_of(&self, index: usize) -> MbpPlayer {
        if index < self.inst.n {
            MbpPlayer::Row(index)
        } else {
            let off = index - self.inst.n;
            MbpPlayer::Gadget(off / 5, off % 5)
        }
    }
}

/// Builds the scheduling game for an MBP instance. The weight scale `M` is
/// the maximum column sum, padded up to 4 (the construction needs `2M - 6 >=
/// 1` and `M` to dominate the column sums, which padding preserves).
pub fn mbp_to_scheduling(inst: &MbpInstance) -> MbpSchedulingGame {
    let max_col_sum = (0..inst.m)
        .map(|j| (0..inst.n).map(|i| inst.a[i][j]).sum::<u64>())
        .max()
        .unwrap_or(0);
    let big_m = max_col_sum.max(4);
    let n = inst.n;
    let total = n + 5 * inst.m;
    let player_of = |index: usize| -> MbpPlayer {
        if index < n {
            MbpPlayer::Row(index)
        } else {
            MbpPlayer::Gadget((index - n) / 5, (index - n) % 5)
        }
    };
    let game = SchedulingGame::from_weight_fn(total, 2, |p1, p2, link| {
        let bump = link as u64; // 0 on link 1, 1 on link 2
        match (player_of(p1), player_of(p2)) {
            (MbpPlayer::Row(_), _) => 0,
            (MbpPlayer::Gadget(k, j), MbpPlayer::Gadget(k2, i)) if k == k2 => {
                if j < 4 {
                    if i == (j + 1) % 4 {
                        big_m - 4 + bump
                    } else {
                        big_m + bump
                    }
                } else {
                    big_m + bump
                }
            }
            (MbpPlayer::Gadget(k, 4), MbpPlayer::Row(i)) => (1 + bump) * inst.a[i][k],
            _ => 0,
        }
    });
    MbpSchedulingGame { game, inst: inst.clone(), big_m }
}

/// `h(x) = x (2M+1) + Rt(M+1, x) - Rt(M, x)` where `Rt(d, x)` is the
/// two-value risk of a cost gap `d` hit with probability `x`. Exceedance of
/// the `2M - 6` bound is decided exactly; the standard-deviation case
/// compares squares to stay rational.
fn h_exceeds_bound(spec: &ValuationSpec, big_m: u64, x: &BigRational) -> Result<bool> {
    let bound = big_ratio(2 * big_m as i64 - 6, 1);
    let linear = x * big_ratio(2 * big_m as i64 + 1, 1);
    match spec {
        ValuationSpec::SdRisk { gamma } => {
            // h(x) = linear + gamma sqrt(x(1-x)); compare via squares
            let rest = &bound - &linear;
            if rest.is_negative() {
                return Ok(true);
            }
            let radicand = x * (BigRational::one() - x);
            Ok(gamma * gamma * radicand > &rest * &rest)
        }
        _ => {
            let rt = |d: i64| -> Result<BigRational> {
                let dist = TwoValueDist::new(
                    Scalar::zero(Mode::Exact),
                    Scalar::from_int(d, Mode::Exact),
                    Scalar::Exact(x.clone()),
                )?;
                Ok(two_value_r(spec, &dist)?.to_rational())
            };
            let h = linear + rt(big_m as i64 + 1)? - rt(big_m as i64)?;
            Ok(h > bound)
        }
    }
}

/// Certificate produced by [`mbp_solution_to_profile`]: the gadget game, the
/// lifted profile, the tuned mixing probability and the verification report.
#[derive(Clone, Debug)]
pub struct MbpCertificate {
    pub scheduling: MbpSchedulingGame,
    pub profile: MixedProfile,
    /// Probability the `[k,4]` players put on link 2.
    pub x: BigRational,
    pub report: EquilibriumReport,
}

/// Lifts an MBP solution to an equilibrium of the scheduling gadget: rows
/// sit on link 1 exactly when selected, gadget players `[k,0],[k,2]` sit on
/// link 1, `[k,1],[k,3]` on link 2, and every `[k,4]` mixes with probability
/// `x` on link 2. `x` is `1/(2M+1)` whenever that already keeps `h` within
/// its band, and otherwise a rational bisection root of `h(x) = 2M - 6`
/// (width `1e-12`). The profile is verified before being returned.
///
/// Supported valuations are the two-value-risk-monotone ones: variance,
/// standard deviation, and moment sums with unit expectation coefficient.
pub fn mbp_solution_to_profile(
    inst: &MbpInstance,
    subset: &[usize],
    spec: &ValuationSpec,
    mode: Mode,
    tol: f64,
) -> Result<MbpCertificate> {
    match spec {
        ValuationSpec::VarRisk { .. } | ValuationSpec::SdRisk { .. } => {}
        ValuationSpec::MomentSum { alpha0, .. } if alpha0.is_one() => {}
        _ => {
            return Err(Error::UnsupportedValuation(format!(
                "{spec} is outside the two-value-risk-monotone family"
            )))
        }
    }
    if !mbp_verify(inst, subset) {
        return Err(Error::InvalidInstance(
            "subset is not a MULTIBALANCED PARTITION solution".into(),
        ));
    }
    let sched = mbp_to_scheduling(inst);
    let big_m = sched.big_m;
    let bound = big_ratio(2 * big_m as i64 - 6, 1);

    let x_hat = big_ratio(1, 2 * big_m as i64 + 1);
    let x = if !h_exceeds_bound(spec, big_m, &x_hat)? {
        x_hat
    } else {
        // h(0) = 0 <= bound < h(x_hat): bisect to a crossing and keep the
        // inner endpoint, which satisfies h <= bound and, once the interval
        // is narrow, also h >= 1.
        let mut lo = BigRational::zero();
        let mut hi = x_hat;
        let width_cap = BigRational::new(BigInt::one(), BigInt::from(10u64).pow(12));
        let half = big_ratio(1, 2);
        while (&hi - &lo) > width_cap {
            let mid = (&hi + &lo) * &half;
            if h_exceeds_bound(spec, big_m, &mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if lo.is_zero() {
            return Err(Error::InvalidInstance(format!(
                "no usable mixing probability below {bound}"
            )));
        }
        lo
    };

    let counts = vec![2usize; sched.num_players()];
    let mut profile = Vec::with_capacity(sched.num_players());
    for index in 0..sched.num_players() {
        profile.push(match sched.player_of(index) {
            MbpPlayer::Row(i) => {
                if subset.contains(&i) {
                    vec![Scalar::one(mode), Scalar::zero(mode)]
                } else {
                    vec![Scalar::zero(mode), Scalar::one(mode)]
                }
            }
            MbpPlayer::Gadget(_, j) if j == 0 || j == 2 => {
                vec![Scalar::one(mode), Scalar::zero(mode)]
            }
            MbpPlayer::Gadget(_, j) if j == 1 || j == 3 => {
                vec![Scalar::zero(mode), Scalar::one(mode)]
            }
            MbpPlayer::Gadget(_, _) => {
                let on2 = Scalar::from_rational(&x, mode);
                vec![Scalar::one(mode) - &on2, on2]
            }
        });
    }
    let profile = MixedProfile::new(profile);
    profile.validate(&counts, mode, crate::game::mode_tol(mode, tol))?;
    let report = verify(spec, &sched.game.eval(mode), &profile, tol)?;
    if !report.is_equilibrium() {
        return Err(Error::VerificationFailed(format!(
            "lifted profile is not an equilibrium: verdict {:?}",
            report.verdict
        )));
    }
    Ok(MbpCertificate { scheduling: sched, profile, x, report })
}

// ---------------------------------------------------------------------------
// Fixed gadgets
// ---------------------------------------------------------------------------

/// Three players on two ordered links, weights `omega(i, (i+1) mod 3, l) =
/// [l = 2]` and `omega(i, (i+2) mod 3, l) = 2 + [l = 2]`: no pure
/// equilibrium, and no mixed equilibrium for the studied valuations.
pub fn three_player_counterexample() -> SchedulingGame {
    SchedulingGame::from_weight_fn(3, 2, |i, j, link| {
        let bump = link as u64;
        if j == (i + 1) % 3 {
            bump
        } else if j == (i + 2) % 3 {
            2 + bump
        } else {
            0
        }
    })
}

/// Rational `delta` in `(0, 1/4]` for which the two-value threshold
/// conditions hold for `spec`: half the minimum of the per-condition bounds,
/// with irrational square roots rounded down to `1/ceil(sqrt(gamma))`.
pub fn delta_for(spec: &ValuationSpec) -> Result<BigRational> {
    let quarter = big_ratio(1, 4);
    let one = BigRational::one();
    let inv_sqrt_floor = |gamma: &BigRational| -> BigRational {
        if gamma <= &one {
            one.clone()
        } else {
            BigRational::new(BigInt::one(), ceil_sqrt(gamma))
        }
    };
    let (delta_a, delta_b) = match spec {
        ValuationSpec::VarRisk { gamma } => (
            &quarter * inv_sqrt_floor(gamma),
            quarter.clone().min(&one / (big_ratio(2, 1) * (&one + gamma))),
        ),
        ValuationSpec::SdRisk { gamma } => (
            &quarter * (&one / gamma).min(one.clone()),
            quarter.clone().min(&one / (big_ratio(2, 1) * (&one + gamma))),
        ),
        ValuationSpec::Combo { gamma, .. } => (
            &quarter * inv_sqrt_floor(gamma),
            quarter.clone().min(&one / gamma),
        ),
        other => {
            return Err(Error::UnsupportedValuation(format!(
                "no delta threshold defined for {other}"
            )))
        }
    };
    Ok(delta_a.min(delta_b) / big_ratio(2, 1))
}

// ---------------------------------------------------------------------------
// Appendix counterexample
// ---------------------------------------------------------------------------

/// The appendix maximization game witnessing that `E - Var` is not strictly
/// convex in the payoff-distribution sense, stored as a minimization game
/// with negated payoffs.
#[derive(Clone, Debug)]
pub struct FpCounterexample {
    /// Minimization form: `cost = -payoff`.
    pub game: Game,
    /// Marks that the stored costs are negated payoffs of a maximization
    /// game.
    pub negated_payoffs: bool,
    /// Row player payoffs, for direct payoff-space checks.
    pub payoffs: Vec<Vec<Scalar>>,
    /// The fixed column mix `<1/4, 1/4, 1/10, 2/5>`.
    pub opponent_mix: Vec<Scalar>,
    /// Pure rows compared by the argument.
    pub first_row: usize,
    pub second_row: usize,
}

impl FpCounterexample {
    /// Full profile with the row player at `row_mix` and the fixed column
    /// mix.
    pub fn profile(&self, row_mix: Vec<Scalar>) -> MixedProfile {
        MixedProfile::new(vec![row_mix, self.opponent_mix.clone()])
    }
}

/// Builds the appendix game: payoffs `9/2, 7/2, 0, 0` on the first row and
/// `0, 0, 5, 15/4` on the second.
pub fn fp_counterexample() -> FpCounterexample {
    let mode = Mode::Exact;
    let pay = |p: i64, q: i64| Scalar::from_ratio(p, q, mode);
    let payoffs = vec![
        vec![pay(9, 2), pay(7, 2), pay(0, 1), pay(0, 1)],
        vec![pay(0, 1), pay(0, 1), pay(5, 1), pay(15, 4)],
    ];
    let zero = Scalar::zero(mode);
    let game = Game::from_cost_fn(
        vec![
            vec!["s1".into(), "s2".into()],
            vec!["t1".into(), "t2".into(), "t3".into(), "t4".into()],
        ],
        |s| vec![-&payoffs[s[0]][s[1]], zero.clone()],
    )
    .expect("appendix game is well-formed");
    FpCounterexample {
        game,
        negated_payoffs: true,
        payoffs,
        opponent_mix: vec![pay(1, 4), pay(1, 4), pay(1, 10), pay(2, 5)],
        first_row: 0,
        second_row: 1,
    }
}

impl fmt::Display for MbpPlayer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MbpPlayer::Row(i) => write!(f, "row:{}", i + 1),
            MbpPlayer::Gadget(k, j) => write!(f, "gadget:{}:{}", k + 1, j),
        }
    }
}

//! Player-specific scheduling games: weighted co-location costs, the
//! polynomial `f(x, j)`, and a combinatorial formula for cost moments that
//! avoids enumerating the profile space.
//!
//! A player's cost on a link is the sum of weights of co-located players, so
//! under a mixed profile the cost conditioned on the player's own link is a
//! sum of independent weighted Bernoulli variables. Central moments of such a
//! sum expand into a partition polynomial over the other players, with terms
//! of order one vanishing; that expansion is [`k_moment_formula`] and also
//! powers the [`CostSource`] implementation used by the equilibrium checker
//! on gadget games too large to materialize.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::scalar::{Mode, Scalar};
use crate::valuation::CostSource;

/// Cap on materialized cost tensors.
const NORMAL_FORM_BUDGET: u128 = 10_000_000;

/// Scheduling game on `m` links where `omega[i][j][l]` is the load player `j`
/// puts on player `i` when both sit on link `l`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchedulingGame {
    pub n: usize,
    pub m: usize,
    pub omega: Vec<Vec<Vec<u64>>>,
}

impl SchedulingGame {
    pub fn new(n: usize, m: usize, omega: Vec<Vec<Vec<u64>>>) -> Result<SchedulingGame> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidGame("scheduling game needs n >= 1, m >= 1".into()));
        }
        if omega.len() != n
            || omega.iter().any(|row| row.len() != n)
            || omega.iter().flatten().any(|w| w.len() != m)
        {
            return Err(Error::InvalidGame(format!(
                "weight table must have shape [{n}][{n}][{m}]"
            )));
        }
        Ok(SchedulingGame { n, m, omega })
    }

    /// Builds the table from a function `(i, j, link) -> weight`.
    pub fn from_weight_fn(
        n: usize,
        m: usize,
        mut w: impl FnMut(usize, usize, usize) -> u64,
    ) -> SchedulingGame {
        let mut omega = vec![vec![vec![0u64; m]; n]; n];
        for (i, row) in omega.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for (l, slot) in cell.iter_mut().enumerate() {
                    *slot = w(i, j, l);
                }
            }
        }
        SchedulingGame { n, m, omega }
    }

    pub fn weight(&self, i: usize, j: usize, link: usize) -> u64 {
        self.omega[i][j][link]
    }

    /// Cost of player `i` on the pure profile `s`: total weight of players
    /// sharing `i`'s link (including `i`'s own self-weight).
    pub fn cost(&self, i: usize, s: &[usize]) -> u64 {
        let link = s[i];
        (0..self.n)
            .filter(|&j| s[j] == link)
            .map(|j| self.omega[i][j][link])
            .sum()
    }

    /// Evaluation adapter fixing the arithmetic mode.
    pub fn eval(&self, mode: Mode) -> SchedulingEval<'_> {
        SchedulingEval { game: self, mode }
    }

    /// Materializes the dense cost tensor. Guarded because the profile count
    /// is `m^n`.
    pub fn to_normal_form(&self, mode: Mode) -> Result<Game> {
        let total = (self.m as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
        if total > NORMAL_FORM_BUDGET {
            return Err(Error::BudgetExceeded(format!(
                "normal form would have {total} profiles (cap {NORMAL_FORM_BUDGET})"
            )));
        }
        let labels: Vec<Vec<String>> = (0..self.n)
            .map(|_| (1..=self.m).map(|l| format!("link:{l}")).collect())
            .collect();
        Game::from_cost_fn(labels, |s| {
            (0..self.n)
                .map(|i| Scalar::from_int(self.cost(i, s) as i64, mode))
                .collect()
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("scheduling game serialization cannot fail")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<SchedulingGame> {
        let raw: SchedulingGame = serde_json::from_value(v.clone())?;
        SchedulingGame::new(raw.n, raw.m, raw.omega)
    }

    fn conditional_mean(&self, i: usize, link: usize, p: &MixedProfile, mode: Mode) -> Scalar {
        let mut acc = Scalar::from_int(self.omega[i][i][link] as i64, mode);
        for j in 0..self.n {
            if j == i {
                continue;
            }
            let w = self.omega[i][j][link];
            if w == 0 {
                continue;
            }
            let q = p.prob(j, link);
            if q.is_zero_tol(0.0) {
                continue;
            }
            acc = acc + Scalar::from_int(w as i64, mode) * q;
        }
        acc
    }
}

/// `f(x, j) = (-x)^j (1-x) + (1-x)^j x`.
///
/// Defined verbatim, so `f(x, 0) = 1` for every `x` in `[0, 1]` including the
/// endpoints, while `f(0, j) = f(1, j) = 0 holds for j >= 1`.
pub fn f(x: &Scalar, j: u32) -> Scalar {
    let one = Scalar::one(x.mode());
    let neg_x = -x;
    let one_minus = &one - x;
    neg_x.powi(j) * &one_minus + one_minus.powi(j) * x
}

fn factorial(k: u32) -> u64 {
    (1..=k as u64).product::<u64>().max(1)
}

fn binomial(n: u32, k: u32) -> u64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Sum over compositions of `k` into parts from `{0} ∪ {min_part..}` across
/// the listed players of `k!/prod r_j! * prod term(j, r_j)`.
fn composition_sum(
    players: &[usize],
    k: u32,
    min_part: u32,
    mode: Mode,
    term: &impl Fn(usize, u32) -> Scalar,
) -> Scalar {
    fn rec(
        players: &[usize],
        idx: usize,
        remaining: u32,
        min_part: u32,
        fact_denom: u64,
        partial: &Scalar,
        term: &impl Fn(usize, u32) -> Scalar,
        k_fact: u64,
        mode: Mode,
        acc: &mut Scalar,
    ) {
        if idx == players.len() {
            if remaining == 0 {
                let coeff = Scalar::from_int((k_fact / fact_denom) as i64, mode);
                *acc = &*acc + coeff * partial;
            }
            return;
        }
        // r_j = 0 contributes a unit factor
        rec(players, idx + 1, remaining, min_part, fact_denom, partial, term, k_fact, mode, acc);
        let mut r = min_part;
        while r <= remaining {
            let factor = term(players[idx], r);
            if !factor.is_zero_tol(0.0) {
                let next = partial * &factor;
                rec(
                    players,
                    idx + 1,
                    remaining - r,
                    min_part,
                    fact_denom * factorial(r),
                    &next,
                    term,
                    k_fact,
                    mode,
                    acc,
                );
            }
            r += 1;
        }
    }

    let mut acc = Scalar::zero(mode);
    let one = Scalar::one(mode);
    rec(players, 0, k, min_part, 1, &one, term, factorial(k), mode, &mut acc);
    acc
}

/// `k`-th central moment of player `i`'s cost when `i` sits pure on `link`,
/// as a partition polynomial over the other players:
/// the sum over `(r_1..r_n)` with `sum r_j = k`, `r_i = 0`, no `r_j = 1`, of
/// `k!/prod r_j! * prod f(p_j(link), r_j) * omega(i,j,link)^{r_j}`.
///
/// Orders 0 and 1 are accepted (the sum is empty for `k = 1`); odd orders
/// three and above are rejected.
pub fn k_moment_formula(
    g: &SchedulingGame,
    i: usize,
    link: usize,
    p: &MixedProfile,
    k: u32,
) -> Result<Scalar> {
    if k >= 3 && k % 2 == 1 {
        return Err(Error::InvalidParameter(format!(
            "moment formula is exposed for even orders (and 0, 1); got k={k}"
        )));
    }
    if i >= g.n || link >= g.m {
        return Err(Error::DimensionMismatch(format!(
            "player {i} / link {link} out of range for n={}, m={}",
            g.n, g.m
        )));
    }
    if p.num_players() != g.n {
        return Err(Error::DimensionMismatch(format!(
            "profile over {} players, game has {}",
            p.num_players(),
            g.n
        )));
    }
    let mode = p.mode().unwrap_or(Mode::Exact);
    Ok(conditional_central_moment(g, i, link, p, k, mode))
}

/// Internal general-order version of the formula; sound for every `k` since
/// the conditional cost is a sum of independent weighted Bernoulli variables.
fn conditional_central_moment(
    g: &SchedulingGame,
    i: usize,
    link: usize,
    p: &MixedProfile,
    k: u32,
    mode: Mode,
) -> Scalar {
    if k == 0 {
        return Scalar::one(mode);
    }
    // Players that can move the conditional distribution: weighted and mixed.
    // Pure opponents shift the cost by a constant, which central moments
    // ignore, and indeed f(0, j) = f(1, j) = 0 for j >= 1.
    let relevant: Vec<usize> = (0..g.n)
        .filter(|&j| {
            if j == i || g.omega[i][j][link] == 0 {
                return false;
            }
            let q = p.prob(j, link);
            !q.is_zero_tol(0.0) && !(q - Scalar::one(mode)).is_zero_tol(0.0)
        })
        .collect();
    composition_sum(&relevant, k, 2, mode, &|j, r| {
        f(p.prob(j, link), r) * Scalar::from_int(g.omega[i][j][link] as i64, mode).powi(r)
    })
}

/// `E[X^t]` for `X = sum_j omega(i,j,link) * Bernoulli(p_j(link))` over the
/// other players, by the same composition expansion with `E[B^r] = p`.
fn conditional_raw_moment_others(
    g: &SchedulingGame,
    i: usize,
    link: usize,
    p: &MixedProfile,
    t: u32,
    mode: Mode,
) -> Scalar {
    if t == 0 {
        return Scalar::one(mode);
    }
    let relevant: Vec<usize> = (0..g.n)
        .filter(|&j| j != i && g.omega[i][j][link] != 0 && !p.prob(j, link).is_zero_tol(0.0))
        .collect();
    composition_sum(&relevant, t, 1, mode, &|j, r| {
        p.prob(j, link).clone() * Scalar::from_int(g.omega[i][j][link] as i64, mode).powi(r)
    })
}

/// Mode-carrying evaluation view of a scheduling game.
#[derive(Clone, Copy)]
pub struct SchedulingEval<'a> {
    game: &'a SchedulingGame,
    mode: Mode,
}

impl CostSource for SchedulingEval<'_> {
    fn mode(&self) -> Mode {
        self.mode
    }

    fn num_players(&self) -> usize {
        self.game.n
    }

    fn num_strategies(&self, _player: usize) -> usize {
        self.game.m
    }

    fn pure_cost(&self, player: usize, profile: &[usize]) -> Scalar {
        Scalar::from_int(self.game.cost(player, profile) as i64, self.mode)
    }

    fn expectation(&self, player: usize, p: &MixedProfile) -> Scalar {
        let mut acc = Scalar::zero(self.mode);
        for link in 0..self.game.m {
            let pl = p.prob(player, link);
            if pl.is_zero_tol(0.0) {
                continue;
            }
            acc = acc + pl * self.game.conditional_mean(player, link, p, self.mode);
        }
        acc
    }

    fn central_moment_about(&self, player: usize, p: &MixedProfile, k: u32, mean: &Scalar) -> Scalar {
        // Mix conditional moments over the player's own link, re-centering
        // each conditional distribution from its own mean to `mean`.
        let mut acc = Scalar::zero(self.mode);
        for link in 0..self.game.m {
            let pl = p.prob(player, link);
            if pl.is_zero_tol(0.0) {
                continue;
            }
            let cond_mean = self.game.conditional_mean(player, link, p, self.mode);
            let shift = &cond_mean - mean;
            let mut cond = Scalar::zero(self.mode);
            for t in 0..=k {
                let cm = conditional_central_moment(self.game, player, link, p, t, self.mode);
                if cm.is_zero_tol(0.0) {
                    continue;
                }
                let c = Scalar::from_int(binomial(k, t) as i64, self.mode);
                cond = cond + c * cm * shift.powi(k - t);
            }
            acc = acc + pl * cond;
        }
        acc
    }

    fn raw_power_mean(&self, player: usize, p: &MixedProfile, r: u32) -> Scalar {
        let mut acc = Scalar::zero(self.mode);
        for link in 0..self.game.m {
            let pl = p.prob(player, link);
            if pl.is_zero_tol(0.0) {
                continue;
            }
            let own = Scalar::from_int(self.game.omega[player][player][link] as i64, self.mode);
            let mut cond = Scalar::zero(self.mode);
            for t in 0..=r {
                let raw = conditional_raw_moment_others(self.game, player, link, p, t, self.mode);
                if raw.is_zero_tol(0.0) {
                    continue;
                }
                let c = Scalar::from_int(binomial(r, t) as i64, self.mode);
                cond = cond + c * own.powi(r - t) * raw;
            }
            acc = acc + pl * cond;
        }
        acc
    }

    fn has_negative_cost(&self) -> bool {
        false
    }
}

/// Per-pair classification in an ordered-links witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    BothZero,
    Increasing,
}

/// Witness that every weight pair satisfies the two-ordered-links shape.
#[derive(Clone, Debug, Serialize)]
pub struct OrderedLinksWitness {
    pub pairs: Vec<Vec<PairKind>>,
}

/// Outcome of [`check_ordered_links`].
#[derive(Clone, Debug, Serialize)]
pub enum OrderedLinksCheck {
    Ordered(OrderedLinksWitness),
    Violation { i: usize, j: usize, w1: u64, w2: u64 },
}

impl OrderedLinksCheck {
    pub fn is_ordered(&self) -> bool {
        matches!(self, OrderedLinksCheck::Ordered(_))
    }
}

/// Checks the two-ordered-links condition: for every player pair, either both
/// weights vanish or the link-1 weight is strictly below the link-2 weight.
/// Only defined for `m = 2`.
pub fn check_ordered_links(g: &SchedulingGame) -> Result<OrderedLinksCheck> {
    if g.m != 2 {
        return Err(Error::InvalidParameter(format!(
            "ordered-links check applies to m=2 games, got m={}",
            g.m
        )));
    }
    let mut pairs = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let mut row = Vec::with_capacity(g.n);
        for j in 0..g.n {
            let (w1, w2) = (g.omega[i][j][0], g.omega[i][j][1]);
            if w1 == 0 && w2 == 0 {
                row.push(PairKind::BothZero);
            } else if w1 < w2 {
                row.push(PairKind::Increasing);
            } else {
                return Ok(OrderedLinksCheck::Violation { i, j, w1, w2 });
            }
        }
        pairs.push(row);
    }
    Ok(OrderedLinksCheck::Ordered(OrderedLinksWitness { pairs }))
}

/// The three-term function whose strict monotonicity in `y` makes adjacent
/// partition terms jointly increasing:
///
/// ```text
/// F(y) = alpha/((r-1)!(s+1)!) f(p,r-1) f(q,s+1) w^{s+1} y^{r-1}
///      +       1/(r! s!)      f(p,r)   f(q,s)   w^s     y^r
///      + beta/((r+1)!(s-1)!)  f(p,r+1) f(q,s-1) w^{s-1} y^{r+1}
/// ```
#[allow(clippy::too_many_arguments)]
pub fn embracing_f(
    r: u32,
    s: u32,
    p: &Scalar,
    q: &Scalar,
    w: &Scalar,
    alpha: &Scalar,
    beta: &Scalar,
    y: &Scalar,
) -> Result<Scalar> {
    if r < 3 || r % 2 == 0 || s < 3 || s % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "r and s must be odd integers >= 3, got r={r}, s={s}"
        )));
    }
    let mode = p.mode();
    let half = Scalar::from_ratio(1, 2, mode);
    if !p.is_positive_tol(0.0) || !(&half - p).is_positive_tol(0.0) {
        return Err(Error::InvalidParameter(format!("need 0 < p < 1/2, got p={p}")));
    }
    if !(q - &half).is_positive_tol(0.0) || !(Scalar::one(mode) - q).is_positive_tol(0.0) {
        return Err(Error::InvalidParameter(format!("need 1/2 < q < 1, got q={q}")));
    }
    if !alpha.is_positive_tol(0.0) || !beta.is_positive_tol(0.0) {
        return Err(Error::InvalidParameter("alpha and beta must be positive".into()));
    }
    if (&(alpha * beta) - &half) < Scalar::zero(mode) {
        return Err(Error::InvalidParameter(format!(
            "need alpha * beta >= 1/2, got {alpha} * {beta}"
        )));
    }
    if !w.is_positive_tol(0.0) {
        return Err(Error::InvalidParameter(format!("weight must be positive, got {w}")));
    }
    if !y.is_nonnegative_tol(0.0) {
        return Err(Error::InvalidParameter(format!("need y >= 0, got {y}")));
    }
    let inv_fact = |a: u32, b: u32| Scalar::from_ratio(1, (factorial(a) * factorial(b)) as i64, mode);
    let t1 = alpha * inv_fact(r - 1, s + 1) * f(p, r - 1) * f(q, s + 1) * w.powi(s + 1) * y.powi(r - 1);
    let t2 = inv_fact(r, s) * f(p, r) * f(q, s) * w.powi(s) * y.powi(r);
    let t3 = beta * inv_fact(r + 1, s - 1) * f(p, r + 1) * f(q, s - 1) * w.powi(s - 1) * y.powi(r + 1);
    Ok(t1 + t2 + t3)
}

/// Random scheduling game on two links with integer weights `<= max_w` and
/// zero self-weights, for fuzz suites.
pub fn random_two_link_game<R: rand::Rng>(rng: &mut R, n: usize, max_w: u64) -> SchedulingGame {
    SchedulingGame::from_weight_fn(n, 2, |i, j, _| {
        if i == j {
            0
        } else {
            rng.gen_range(0..=max_w)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::three_player_counterexample;
    use crate::scalar::DEFAULT_TOL;
    use crate::valuation::k_moment;
    use rand::SeedableRng;

    fn exact(p: i64, q: i64) -> Scalar {
        Scalar::from_ratio(p, q, Mode::Exact)
    }

    #[test]
    fn f_examples() {
        for x in [exact(0, 1), exact(3, 10), exact(1, 2), exact(1, 1)] {
            assert_eq!(f(&x, 0), exact(1, 1));
            assert_eq!(f(&x, 1), exact(0, 1));
        }
        assert_eq!(f(&exact(1, 2), 3), exact(0, 1));
        assert_eq!(f(&exact(3, 10), 2), exact(21, 100));
    }

    #[test]
    fn f_identities_on_grid() {
        // vanishing at the endpoints for positive orders, evenness/oddness
        // symmetry, and sign pattern around 1/2
        for j in 1..=9u32 {
            assert_eq!(f(&exact(0, 1), j), exact(0, 1));
            assert_eq!(f(&exact(1, 1), j), exact(0, 1));
        }
        for num in 1..100i64 {
            let x = exact(num, 100);
            let mirror = exact(100 - num, 100);
            for j in [2u32, 4, 6, 8] {
                assert!(f(&x, j) > exact(0, 1), "f({x},{j}) > 0");
                assert_eq!(f(&x, j), f(&mirror, j));
            }
            for j in [3u32, 5, 7] {
                assert_eq!(f(&x, j), -f(&mirror, j));
                if num < 50 {
                    assert!(f(&x, j) > exact(0, 1));
                } else if num > 50 {
                    assert!(f(&x, j) < exact(0, 1));
                }
            }
        }
    }

    #[test]
    fn cost_examples_from_three_player_game() {
        let g = three_player_counterexample();
        // everyone on link 1: player 0 pays omega(0,1,1) + omega(0,2,1) = 0 + 2
        assert_eq!(g.cost(0, &[0, 0, 0]), 2);
        // players 0,1 on link 2, player 2 on link 1: player 0 pays omega(0,1,2) = 1
        assert_eq!(g.cost(0, &[1, 1, 0]), 1);
        // lone player with zero self-weight pays nothing
        assert_eq!(g.cost(2, &[0, 0, 1]), 0);
    }

    #[test]
    fn moment_formula_trivial_orders() {
        let g = three_player_counterexample();
        let p = MixedProfile::uniform(&[2, 2, 2], Mode::Exact);
        assert_eq!(k_moment_formula(&g, 0, 0, &p, 0).unwrap(), exact(1, 1));
        assert_eq!(k_moment_formula(&g, 0, 0, &p, 1).unwrap(), exact(0, 1));
        assert!(k_moment_formula(&g, 0, 0, &p, 3).is_err());
    }

    #[test]
    fn single_opponent_second_moment_is_f_times_weight_squared() {
        let g = SchedulingGame::from_weight_fn(2, 2, |i, j, l| {
            if i == 0 && j == 1 {
                3 + l as u64
            } else {
                0
            }
        });
        let p = MixedProfile::new(vec![
            vec![exact(1, 1), exact(0, 1)],
            vec![exact(2, 5), exact(3, 5)],
        ]);
        let got = k_moment_formula(&g, 0, 0, &p, 2).unwrap();
        assert_eq!(got, f(&exact(2, 5), 2) * exact(9, 1));
    }

    #[test]
    fn formula_matches_definition_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = rand::Rng::gen_range(&mut rng, 2..=4usize);
            let g = random_two_link_game(&mut rng, n, 5);
            let nf = g.to_normal_form(Mode::Exact).unwrap();
            let p = crate::sampling::random_mixed_profile(&mut rng, &vec![2; n], Mode::Exact, 8);
            let i = rand::Rng::gen_range(&mut rng, 0..n);
            for link in 0..2 {
                let pinned = p.with_pure_player(i, link, Mode::Exact);
                for k in [0u32, 1, 2, 4, 6, 8] {
                    let lhs = k_moment_formula(&g, i, link, &p, k).unwrap();
                    let rhs = k_moment(&nf, i, &pinned, k).unwrap();
                    assert_eq!(lhs, rhs, "n={n} i={i} link={link} k={k}");
                }
            }
        }
    }

    #[test]
    fn eval_agrees_with_normal_form_on_mixed_profiles() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rand::Rng::gen_range(&mut rng, 2..=4usize);
            let g = random_two_link_game(&mut rng, n, 4);
            let nf = g.to_normal_form(Mode::Exact).unwrap();
            let p = crate::sampling::random_mixed_profile(&mut rng, &vec![2; n], Mode::Exact, 6);
            let ev = g.eval(Mode::Exact);
            for i in 0..n {
                let e_fast = ev.expectation(i, &p);
                let e_slow = CostSource::expectation(&nf, i, &p);
                assert_eq!(e_fast, e_slow);
                for k in [2u32, 3, 4, 6] {
                    let fast = ev.central_moment_about(i, &p, k, &e_fast);
                    let slow = nf.central_moment_about(i, &p, k, &e_slow);
                    assert_eq!(fast, slow, "central moment k={k}");
                }
                for r in [2u32, 3] {
                    assert_eq!(ev.raw_power_mean(i, &p, r), nf.raw_power_mean(i, &p, r));
                }
            }
        }
    }

    #[test]
    fn normal_form_sizes() {
        let g = three_player_counterexample();
        assert_eq!(g.to_normal_form(Mode::Exact).unwrap().num_profiles(), 8);
        let zero = SchedulingGame::from_weight_fn(2, 2, |_, _, _| 0);
        let nf = zero.to_normal_form(Mode::Exact).unwrap();
        for s in nf.profiles() {
            for i in 0..2 {
                assert_eq!(nf.cost(i, &s).clone(), exact(0, 1));
            }
        }
        let huge = SchedulingGame::from_weight_fn(30, 2, |_, _, _| 0);
        assert!(matches!(huge.to_normal_form(Mode::Exact), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn ordered_links_check() {
        assert!(check_ordered_links(&three_player_counterexample()).unwrap().is_ordered());

        let bad = SchedulingGame::from_weight_fn(2, 2, |i, j, _| if i != j { 5 } else { 0 });
        match check_ordered_links(&bad).unwrap() {
            OrderedLinksCheck::Violation { w1, w2, .. } => {
                assert_eq!((w1, w2), (5, 5));
            }
            _ => panic!("expected a violation"),
        }

        let zero = SchedulingGame::from_weight_fn(2, 2, |_, _, _| 0);
        assert!(check_ordered_links(&zero).unwrap().is_ordered());

        let three_links = SchedulingGame::from_weight_fn(2, 3, |_, _, _| 0);
        assert!(check_ordered_links(&three_links).is_err());
    }

    #[test]
    fn embracing_f_basics() {
        let p = Scalar::Float(0.3);
        let q = Scalar::Float(0.7);
        let one = Scalar::Float(1.0);
        // all terms carry positive powers of y, so F(0) = 0
        let at_zero = embracing_f(3, 3, &p, &q, &one, &one, &one, &Scalar::Float(0.0)).unwrap();
        assert!(at_zero.is_zero_tol(DEFAULT_TOL));
        // the middle term is negative on this parameter range
        assert!((f(&p, 3) * f(&q, 3)) < Scalar::Float(0.0));
        // strictly increasing on a sampled grid
        let mut prev = at_zero;
        for step in 1..=50 {
            let y = Scalar::Float(step as f64 * 0.1);
            let cur = embracing_f(3, 3, &p, &q, &one, &one, &one, &y).unwrap();
            assert!(cur > prev, "F not increasing at y={y}");
            prev = cur;
        }
        // parameter validation
        assert!(embracing_f(2, 3, &p, &q, &one, &one, &one, &one).is_err());
        assert!(embracing_f(3, 3, &q, &q, &one, &one, &one, &one).is_err());
        let tiny = Scalar::Float(0.4);
        assert!(embracing_f(3, 3, &p, &q, &one, &tiny, &one, &one).is_err());
    }

    #[test]
    fn geometric_mean_inequality_on_grid() {
        for r in [3u32, 5, 7] {
            for num in 1..100i64 {
                let x = exact(num, 100);
                let lhs = f(&x, r - 1) * f(&x, r + 1);
                let rhs = f(&x, r).powi(2);
                assert!(lhs > rhs, "r={r}, x={x}");
            }
        }
    }

    #[test]
    fn scheduling_json_round_trip() {
        let g = three_player_counterexample();
        let v = g.to_json_value();
        let g2 = SchedulingGame::from_json_value(&v).unwrap();
        assert_eq!(g.omega, g2.omega);
    }
}

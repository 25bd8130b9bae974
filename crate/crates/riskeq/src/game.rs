//! Finite normal-form minimization games, pure and mixed profiles, profile
//! probabilities and supports.
//!
//! Costs live in a dense tensor indexed by mixed-radix profile ids; every
//! entry of one game shares a single arithmetic [`Mode`]. All types are
//! immutable after construction and freely shareable across threads.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Mode, Scalar, DEFAULT_TOL};

/// A pure profile: one strategy index per player.
pub type PureProfile = Vec<usize>;

/// Finite n-player minimization game with explicit cost tensor.
#[derive(Clone, Debug)]
pub struct Game {
    strategies: Vec<Vec<String>>,
    /// `costs[flat_profile][player]`
    costs: Vec<Vec<Scalar>>,
    strides: Vec<usize>,
    mode: Mode,
}

impl Game {
    /// Builds a game from per-player strategy labels and a cost function.
    ///
    /// The paper's definition asks for at least two players; degenerate
    /// one-player games are accepted here because the search operations use
    /// them as base cases.
    pub fn from_cost_fn(
        strategies: Vec<Vec<String>>,
        cost_fn: impl Fn(&[usize]) -> Vec<Scalar>,
    ) -> Result<Game> {
        if strategies.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        for (i, labels) in strategies.iter().enumerate() {
            if labels.is_empty() {
                return Err(Error::InvalidGame(format!("player {i} has no strategies")));
            }
            for l in labels {
                if l.contains(',') {
                    return Err(Error::InvalidGame(format!(
                        "strategy label {l:?} contains a comma (reserved for profile keys)"
                    )));
                }
            }
        }
        let n = strategies.len();
        let counts: Vec<usize> = strategies.iter().map(Vec::len).collect();
        let total: usize = counts.iter().product();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let mut costs = Vec::with_capacity(total);
        let mut mode = None;
        let mut profile = vec![0usize; n];
        for flat in 0..total {
            decode(flat, &strides, &counts, &mut profile);
            let c = cost_fn(&profile);
            if c.len() != n {
                return Err(Error::InvalidGame(format!(
                    "cost vector has {} entries for {n} players",
                    c.len()
                )));
            }
            for entry in &c {
                if !entry.is_finite() {
                    return Err(Error::InvalidGame("non-finite cost entry".into()));
                }
                match mode {
                    None => mode = Some(entry.mode()),
                    Some(m) if m == entry.mode() => {}
                    Some(m) => {
                        return Err(Error::ModeMismatch(format!(
                            "cost tensor mixes {m} and {} entries",
                            entry.mode()
                        )))
                    }
                }
            }
            costs.push(c);
        }
        Ok(Game { strategies, costs, strides, mode: mode.expect("nonempty tensor") })
    }

    /// Two-player convenience constructor from row-major cost matrices.
    pub fn bimatrix(
        labels1: Vec<String>,
        labels2: Vec<String>,
        costs1: Vec<Vec<Scalar>>,
        costs2: Vec<Vec<Scalar>>,
    ) -> Result<Game> {
        Game::from_cost_fn(vec![labels1, labels2], |s| {
            vec![costs1[s[0]][s[1]].clone(), costs2[s[0]][s[1]].clone()]
        })
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn num_strategies(&self, player: usize) -> usize {
        self.strategies[player].len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategies.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, player: usize) -> &[String] {
        &self.strategies[player]
    }

    /// Index of a label in a player's strategy set.
    pub fn strategy_index(&self, player: usize, label: &str) -> Option<usize> {
        self.strategies[player].iter().position(|l| l == label)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn num_profiles(&self) -> usize {
        self.costs.len()
    }

    pub fn flat_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(s, k)| s * k).sum()
    }

    pub fn cost(&self, player: usize, profile: &[usize]) -> &Scalar {
        &self.costs[self.flat_index(profile)][player]
    }

    pub fn cost_by_flat(&self, player: usize, flat: usize) -> &Scalar {
        &self.costs[flat][player]
    }

    pub fn decode_flat(&self, flat: usize, out: &mut [usize]) {
        let counts = self.strategy_counts();
        decode(flat, &self.strides, &counts, out);
    }

    /// Iterates over all pure profiles.
    pub fn profiles(&self) -> impl Iterator<Item = PureProfile> + '_ {
        let counts = self.strategy_counts();
        let strides = self.strides.clone();
        (0..self.num_profiles()).map(move |flat| {
            let mut p = vec![0usize; counts.len()];
            decode(flat, &strides, &counts, &mut p);
            p
        })
    }

    pub fn has_negative_cost(&self) -> bool {
        self.costs
            .iter()
            .flatten()
            .any(|c| !c.is_nonnegative_tol(0.0))
    }

    /// A game with every cost negated (cost/payoff sign flip).
    pub fn negated(&self) -> Game {
        Game {
            strategies: self.strategies.clone(),
            costs: self
                .costs
                .iter()
                .map(|row| row.iter().map(|c| -c).collect())
                .collect(),
            strides: self.strides.clone(),
            mode: self.mode,
        }
    }
}

fn decode(flat: usize, strides: &[usize], counts: &[usize], out: &mut [usize]) {
    for i in 0..strides.len() {
        out[i] = (flat / strides[i]) % counts[i];
    }
}

/// One probability vector per player over that player's strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub strategies: Vec<Vec<Scalar>>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<Vec<Scalar>>) -> MixedProfile {
        MixedProfile { strategies }
    }

    /// The degenerate profile putting probability one on `profile`.
    pub fn pure(counts: &[usize], profile: &[usize], mode: Mode) -> MixedProfile {
        let strategies = counts
            .iter()
            .zip(profile)
            .map(|(&m, &s)| {
                (0..m)
                    .map(|t| Scalar::from_int((t == s) as i64, mode))
                    .collect()
            })
            .collect();
        MixedProfile { strategies }
    }

    /// Per-player uniform distribution.
    pub fn uniform(counts: &[usize], mode: Mode) -> MixedProfile {
        let strategies = counts
            .iter()
            .map(|&m| (0..m).map(|_| Scalar::from_ratio(1, m as i64, mode)).collect())
            .collect();
        MixedProfile { strategies }
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    pub fn prob(&self, player: usize, strategy: usize) -> &Scalar {
        &self.strategies[player][strategy]
    }

    pub fn mode(&self) -> Option<Mode> {
        self.strategies.iter().flatten().next().map(Scalar::mode)
    }

    /// Validates entrywise nonnegativity, per-player sums of one and
    /// dimension agreement with `counts`, under the given tolerance.
    pub fn validate(&self, counts: &[usize], mode: Mode, tol: f64) -> Result<()> {
        if self.strategies.len() != counts.len() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} players, game has {}",
                self.strategies.len(),
                counts.len()
            )));
        }
        for (i, (probs, &m)) in self.strategies.iter().zip(counts).enumerate() {
            if probs.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "player {i}: {} probabilities for {m} strategies",
                    probs.len()
                )));
            }
            let mut sum = Scalar::zero(mode);
            for p in probs {
                if p.mode() != mode {
                    return Err(Error::ModeMismatch(format!(
                        "player {i} probability mode {} differs from game mode {mode}",
                        p.mode()
                    )));
                }
                if !p.is_nonnegative_tol(tol) {
                    return Err(Error::InvalidProfile(format!(
                        "player {i} has negative probability {p}"
                    )));
                }
                sum = sum + p;
            }
            if !sum.approx_eq(&Scalar::one(mode), tol) {
                return Err(Error::InvalidProfile(format!(
                    "player {i} probabilities sum to {sum}, expected 1"
                )));
            }
        }
        Ok(())
    }

    /// Copy of the profile with player `i` replaced by the pure strategy `s`.
    pub fn with_pure_player(&self, i: usize, s: usize, mode: Mode) -> MixedProfile {
        let mut out = self.clone();
        out.strategies[i] = (0..self.strategies[i].len())
            .map(|t| Scalar::from_int((t == s) as i64, mode))
            .collect();
        out
    }

    /// True when every player plays a 0/1 vector (up to tol in float mode).
    pub fn is_pure(&self, tol: f64) -> bool {
        self.strategies.iter().all(|probs| {
            probs
                .iter()
                .all(|p| p.is_zero_tol(tol) || p.approx_eq(&Scalar::one(p.mode()), tol))
        })
    }
}

impl fmt::Display for MixedProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, probs) in self.strategies.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "(")?;
            for (j, p) in probs.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{p}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Per-player sets of strategies played with positive probability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support(pub Vec<Vec<usize>>);

/// Probability `p(s) = prod_i p_i(s_i)` the mixed profile induces on a pure
/// profile.
pub fn profile_probability(p: &MixedProfile, s: &[usize]) -> Result<Scalar> {
    if p.num_players() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "profile over {} players, pure profile of length {}",
            p.num_players(),
            s.len()
        )));
    }
    let mode = p.mode().unwrap_or(Mode::Exact);
    let mut out = Scalar::one(mode);
    for (i, &si) in s.iter().enumerate() {
        if si >= p.strategies[i].len() {
            return Err(Error::DimensionMismatch(format!(
                "strategy {si} out of range for player {i}"
            )));
        }
        out = out * p.prob(i, si);
    }
    Ok(out)
}

/// Per-player support sets; entries above `tol` count as positive in float
/// mode, exact positivity is used in exact mode.
pub fn support(p: &MixedProfile, tol: f64) -> Support {
    Support(
        p.strategies
            .iter()
            .map(|probs| {
                probs
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| q.is_positive_tol(tol))
                    .map(|(s, _)| s)
                    .collect()
            })
            .collect(),
    )
}

/// Enumerates the partial profiles over everyone but player `i`, in
/// lexicographic order; each item lists the other players' strategies in
/// player order.
pub fn enumerate_partial_profiles<'a>(
    g: &'a Game,
    i: usize,
) -> impl Iterator<Item = Vec<usize>> + 'a {
    let counts: Vec<usize> = (0..g.num_players())
        .filter(|&j| j != i)
        .map(|j| g.num_strategies(j))
        .collect();
    let total: usize = counts.iter().product();
    (0..total).map(move |mut flat| {
        let mut out = vec![0usize; counts.len()];
        for k in (0..counts.len()).rev() {
            out[k] = flat % counts[k];
            flat /= counts[k];
        }
        out
    })
}

/// Serialization schema for [`Game`].
#[derive(Serialize, Deserialize)]
struct GameJson {
    players: usize,
    strategies: Vec<Vec<String>>,
    costs: BTreeMap<String, Vec<Scalar>>,
}

impl Game {
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut costs = BTreeMap::new();
        for s in self.profiles() {
            let key = s
                .iter()
                .enumerate()
                .map(|(i, &si)| self.strategies[i][si].clone())
                .collect::<Vec<_>>()
                .join(",");
            costs.insert(key, self.costs[self.flat_index(&s)].clone());
        }
        serde_json::to_value(GameJson {
            players: self.num_players(),
            strategies: self.strategies.clone(),
            costs,
        })
        .expect("game serialization cannot fail")
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Game> {
        let raw: GameJson = serde_json::from_value(v.clone())?;
        if raw.players != raw.strategies.len() {
            return Err(Error::InvalidGame(format!(
                "declared {} players but {} strategy lists",
                raw.players,
                raw.strategies.len()
            )));
        }
        let total: usize = raw.strategies.iter().map(Vec::len).product();
        if raw.costs.len() != total {
            return Err(Error::InvalidGame(format!(
                "cost map has {} entries, expected one per profile ({total})",
                raw.costs.len()
            )));
        }
        let strategies = raw.strategies;
        let lookup = |key: &str| -> Result<PureProfile> {
            let parts: Vec<&str> = key.split(',').collect();
            if parts.len() != strategies.len() {
                return Err(Error::InvalidGame(format!("bad profile key {key:?}")));
            }
            parts
                .iter()
                .enumerate()
                .map(|(i, label)| {
                    strategies[i]
                        .iter()
                        .position(|l| l == label)
                        .ok_or_else(|| {
                            Error::InvalidGame(format!(
                                "unknown strategy {label:?} for player {i} in key {key:?}"
                            ))
                        })
                })
                .collect()
        };
        let mut table: BTreeMap<PureProfile, Vec<Scalar>> = BTreeMap::new();
        for (key, c) in &raw.costs {
            table.insert(lookup(key)?, c.clone());
        }
        if table.len() != total {
            return Err(Error::InvalidGame("duplicate profile keys".into()));
        }
        Game::from_cost_fn(strategies, |s| table[s].clone())
    }
}

/// Validation tolerance to use for a game's mode.
pub fn mode_tol(mode: Mode, tol: f64) -> f64 {
    match mode {
        Mode::Exact => 0.0,
        Mode::Float => tol,
    }
}

/// Default tolerance resolution helper.
pub fn default_tol(mode: Mode) -> f64 {
    mode_tol(mode, DEFAULT_TOL)
}

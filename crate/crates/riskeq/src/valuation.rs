//! (E+R)-valuations of mixed profiles: expectation, moments, variance and
//! standard-deviation risk, power-mean valuations, and convex combinations,
//! plus the closed two-value forms used throughout the gadget analysis.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::scalar::{parse_rational, Mode, Scalar};

/// Description of a player valuation.
///
/// Every variant is of the form `V = E + R` with a nonnegative risk term
/// except [`ValuationSpec::MomentSum`], which generalizes to
/// `V = alpha0 * E + sum alpha_k * kM` and coincides with the `E + R` form at
/// `alpha0 = 1`. Moment sums are trusted to be concave by the caller; see
/// [`concavity_spot_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum ValuationSpec {
    /// `V = E`.
    Expectation,
    /// `V = E + gamma * Var`, `gamma > 0`.
    VarRisk { gamma: BigRational },
    /// `V = E + gamma * SD`, `gamma > 0`.
    SdRisk { gamma: BigRational },
    /// `V = alpha0 * E + sum_{k in {2,4,6,8}} alpha_k * kM`, all coefficients
    /// nonnegative; concavity is asserted by the caller.
    MomentSum {
        alpha0: BigRational,
        alpha: BTreeMap<u32, BigRational>,
    },
    /// `V = (E[cost^r])^(1/r)`, `r >= 2`; needs nonnegative costs.
    NuPower { r: u32 },
    /// `V = lambda (E + gamma Var) + (1 - lambda) (E[cost^r])^(1/r)`,
    /// `0 < lambda <= 1`, `gamma > 0`, `r >= 2`; needs nonnegative costs.
    Combo {
        lambda: BigRational,
        gamma: BigRational,
        r: u32,
    },
}

impl ValuationSpec {
    pub fn var(gamma: BigRational) -> Result<ValuationSpec> {
        if !gamma.is_positive() {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(ValuationSpec::VarRisk { gamma })
    }

    pub fn sd(gamma: BigRational) -> Result<ValuationSpec> {
        if !gamma.is_positive() {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
        }
        Ok(ValuationSpec::SdRisk { gamma })
    }

    pub fn moment_sum(alpha0: BigRational, alpha: BTreeMap<u32, BigRational>) -> Result<ValuationSpec> {
        if alpha0.is_negative() {
            return Err(Error::InvalidParameter("alpha0 must be >= 0".into()));
        }
        for (&k, a) in &alpha {
            if !matches!(k, 2 | 4 | 6 | 8) {
                return Err(Error::InvalidParameter(format!(
                    "moment order {k} unsupported; use k in {{2,4,6,8}}"
                )));
            }
            if a.is_negative() {
                return Err(Error::InvalidParameter(format!("alpha_{k} must be >= 0")));
            }
        }
        Ok(ValuationSpec::MomentSum { alpha0, alpha })
    }

    pub fn nu_power(r: u32) -> Result<ValuationSpec> {
        if r < 2 {
            return Err(Error::InvalidParameter(format!("power r must be >= 2, got {r}")));
        }
        Ok(ValuationSpec::NuPower { r })
    }

    pub fn combo(lambda: BigRational, gamma: BigRational, r: u32) -> Result<ValuationSpec> {
        if !lambda.is_positive() || lambda > BigRational::one() {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in (0,1], got {lambda}"
            )));
        }
        if !gamma.is_positive() {
            return Err(Error::InvalidParameter(format!("gamma must be > 0, got {gamma}")));
        }
        if r < 2 {
            return Err(Error::InvalidParameter(format!("power r must be >= 2, got {r}")));
        }
        Ok(ValuationSpec::Combo { lambda, gamma, r })
    }

    /// Whether evaluating this valuation involves a power mean of costs,
    /// which requires nonnegative costs.
    pub fn needs_nonnegative_costs(&self) -> bool {
        matches!(self, ValuationSpec::NuPower { .. } | ValuationSpec::Combo { .. })
    }

    /// Specs whose concavity in the own mixed strategy is established
    /// analytically rather than asserted by the caller.
    pub fn concavity_is_builtin(&self) -> bool {
        !matches!(self, ValuationSpec::MomentSum { .. })
    }

    /// Parses either a shorthand like `e+var:gamma=1` or a JSON object.
    pub fn parse(text: &str) -> Result<ValuationSpec> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(trimmed)?;
            return serde_json::from_value(v).map_err(Error::from);
        }
        let (kind, args) = match trimmed.split_once(':') {
            Some((k, a)) => (k, a),
            None => (trimmed, ""),
        };
        let mut map = BTreeMap::new();
        for part in args.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                Error::Parse(format!("expected key=value in valuation argument {part:?}"))
            })?;
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        let rat = |map: &BTreeMap<String, String>, key: &str, default: Option<&str>| -> Result<BigRational> {
            match map.get(key) {
                Some(v) => parse_rational(v),
                None => match default {
                    Some(d) => parse_rational(d),
                    None => Err(Error::Parse(format!("missing argument {key} for valuation {kind}"))),
                },
            }
        };
        match kind {
            "e" => Ok(ValuationSpec::Expectation),
            "e+var" => ValuationSpec::var(rat(&map, "gamma", Some("1"))?),
            "e+sd" => ValuationSpec::sd(rat(&map, "gamma", Some("1"))?),
            "moments" => {
                for key in map.keys() {
                    if !matches!(key.as_str(), "a0" | "a2" | "a4" | "a6" | "a8") {
                        return Err(Error::Parse(format!(
                            "unknown moment coefficient {key:?}; use a0, a2, a4, a6, a8"
                        )));
                    }
                }
                let alpha0 = rat(&map, "a0", Some("1"))?;
                let mut alpha = BTreeMap::new();
                for k in [2u32, 4, 6, 8] {
                    if let Some(v) = map.get(&format!("a{k}")) {
                        alpha.insert(k, parse_rational(v)?);
                    }
                }
                ValuationSpec::moment_sum(alpha0, alpha)
            }
            "nu" => {
                let r: u32 = map
                    .get("r")
                    .ok_or_else(|| Error::Parse("missing argument r for valuation nu".into()))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad r: {e}")))?;
                ValuationSpec::nu_power(r)
            }
            "combo" => {
                let r: u32 = map
                    .get("r")
                    .ok_or_else(|| Error::Parse("missing argument r for valuation combo".into()))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad r: {e}")))?;
                ValuationSpec::combo(rat(&map, "lambda", None)?, rat(&map, "gamma", Some("1"))?, r)
            }
            other => Err(Error::Parse(format!("unknown valuation kind {other:?}"))),
        }
    }
}

impl fmt::Display for ValuationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationSpec::Expectation => write!(f, "e"),
            ValuationSpec::VarRisk { gamma } => write!(f, "e+var:gamma={gamma}"),
            ValuationSpec::SdRisk { gamma } => write!(f, "e+sd:gamma={gamma}"),
            ValuationSpec::MomentSum { alpha0, alpha } => {
                write!(f, "moments:a0={alpha0}")?;
                for (k, a) in alpha {
                    write!(f, ",a{k}={a}")?;
                }
                Ok(())
            }
            ValuationSpec::NuPower { r } => write!(f, "nu:r={r}"),
            ValuationSpec::Combo { lambda, gamma, r } => {
                write!(f, "combo:lambda={lambda},gamma={gamma},r={r}")
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<String>,
}

impl Serialize for ValuationSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut out = SpecJson { kind: String::new(), gamma: None, alpha: None, r: None, lambda: None };
        match self {
            ValuationSpec::Expectation => out.kind = "e".into(),
            ValuationSpec::VarRisk { gamma } => {
                out.kind = "e+var".into();
                out.gamma = Some(gamma.to_string());
            }
            ValuationSpec::SdRisk { gamma } => {
                out.kind = "e+sd".into();
                out.gamma = Some(gamma.to_string());
            }
            ValuationSpec::MomentSum { alpha0, alpha } => {
                out.kind = "moments".into();
                let mut m = BTreeMap::new();
                m.insert("0".to_string(), alpha0.to_string());
                for (k, a) in alpha {
                    m.insert(k.to_string(), a.to_string());
                }
                out.alpha = Some(m);
            }
            ValuationSpec::NuPower { r } => {
                out.kind = "nu".into();
                out.r = Some(*r);
            }
            ValuationSpec::Combo { lambda, gamma, r } => {
                out.kind = "combo".into();
                out.lambda = Some(lambda.to_string());
                out.gamma = Some(gamma.to_string());
                out.r = Some(*r);
            }
        }
        out.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ValuationSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = SpecJson::deserialize(deserializer)?;
        let rat = |o: &Option<String>, name: &str| -> std::result::Result<BigRational, D::Error> {
            o.as_deref()
                .ok_or_else(|| DeError::custom(format!("missing field {name}")))
                .and_then(|s| parse_rational(s).map_err(DeError::custom))
        };
        let spec = match raw.kind.as_str() {
            "e" => ValuationSpec::Expectation,
            "e+var" => ValuationSpec::var(rat(&raw.gamma, "gamma")?).map_err(DeError::custom)?,
            "e+sd" => ValuationSpec::sd(rat(&raw.gamma, "gamma")?).map_err(DeError::custom)?,
            "moments" => {
                let m = raw.alpha.unwrap_or_default();
                let mut alpha0 = BigRational::one();
                let mut alpha = BTreeMap::new();
                for (k, v) in &m {
                    let value = parse_rational(v).map_err(DeError::custom)?;
                    let order: u32 = k.parse().map_err(DeError::custom)?;
                    if order == 0 {
                        alpha0 = value;
                    } else {
                        alpha.insert(order, value);
                    }
                }
                ValuationSpec::moment_sum(alpha0, alpha).map_err(DeError::custom)?
            }
            "nu" => ValuationSpec::nu_power(
                raw.r.ok_or_else(|| DeError::custom("missing field r"))?,
            )
            .map_err(DeError::custom)?,
            "combo" => ValuationSpec::combo(
                rat(&raw.lambda, "lambda")?,
                rat(&raw.gamma, "gamma")?,
                raw.r.ok_or_else(|| DeError::custom("missing field r"))?,
            )
            .map_err(DeError::custom)?,
            other => return Err(DeError::custom(format!("unknown valuation kind {other:?}"))),
        };
        Ok(spec)
    }
}

/// Anything a valuation can be evaluated on: exposes per-player cost
/// expectations and moments under a mixed profile.
///
/// [`Game`] implements this by full profile enumeration (the definitional
/// route); scheduling games implement it through the combinatorial moment
/// formula, which keeps large gadget games tractable.
pub trait CostSource {
    fn mode(&self) -> Mode;
    fn num_players(&self) -> usize;
    fn num_strategies(&self, player: usize) -> usize;
    fn pure_cost(&self, player: usize, profile: &[usize]) -> Scalar;
    fn expectation(&self, player: usize, p: &MixedProfile) -> Scalar;
    /// `k`-th moment of the cost about `mean`.
    fn central_moment_about(&self, player: usize, p: &MixedProfile, k: u32, mean: &Scalar) -> Scalar;
    /// `E[cost^r]`.
    fn raw_power_mean(&self, player: usize, p: &MixedProfile, r: u32) -> Scalar;
    fn has_negative_cost(&self) -> bool;

    fn strategy_counts(&self) -> Vec<usize> {
        (0..self.num_players()).map(|i| self.num_strategies(i)).collect()
    }
}

impl CostSource for Game {
    fn mode(&self) -> Mode {
        Game::mode(self)
    }

    fn num_players(&self) -> usize {
        Game::num_players(self)
    }

    fn num_strategies(&self, player: usize) -> usize {
        Game::num_strategies(self, player)
    }

    fn pure_cost(&self, player: usize, profile: &[usize]) -> Scalar {
        self.cost(player, profile).clone()
    }

    fn expectation(&self, player: usize, p: &MixedProfile) -> Scalar {
        self.weighted_sum(p, |s| self.pure_cost(player, s))
    }

    fn central_moment_about(&self, player: usize, p: &MixedProfile, k: u32, mean: &Scalar) -> Scalar {
        self.weighted_sum(p, |s| (self.cost(player, s) - mean).powi(k))
    }

    fn raw_power_mean(&self, player: usize, p: &MixedProfile, r: u32) -> Scalar {
        self.weighted_sum(p, |s| self.cost(player, s).powi(r))
    }

    fn has_negative_cost(&self) -> bool {
        Game::has_negative_cost(self)
    }
}

impl Game {
    /// `sum_s p(s) f(s)` over pure profiles with positive probability.
    fn weighted_sum(&self, p: &MixedProfile, f: impl Fn(&[usize]) -> Scalar) -> Scalar {
        let mode = Game::mode(self);
        let n = Game::num_players(self);
        let mut profile = vec![0usize; n];
        let mut acc = Scalar::zero(mode);
        'outer: for flat in 0..self.num_profiles() {
            self.decode_flat(flat, &mut profile);
            let mut prob = Scalar::one(mode);
            for (i, &s) in profile.iter().enumerate() {
                let q = p.prob(i, s);
                if q.is_zero_tol(0.0) {
                    continue 'outer;
                }
                prob = prob * q;
            }
            acc = acc + prob * f(&profile);
        }
        acc
    }
}

fn check_compat<S: CostSource + ?Sized>(src: &S, i: usize, p: &MixedProfile) -> Result<()> {
    if i >= src.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "player {i} out of range for {}-player game",
            src.num_players()
        )));
    }
    if p.num_players() != src.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "profile over {} players, game has {}",
            p.num_players(),
            src.num_players()
        )));
    }
    for j in 0..src.num_players() {
        if p.strategies[j].len() != src.num_strategies(j) {
            return Err(Error::DimensionMismatch(format!(
                "player {j}: profile has {} entries, game has {} strategies",
                p.strategies[j].len(),
                src.num_strategies(j)
            )));
        }
    }
    Ok(())
}

/// Expected cost `E_i(p) = sum_s p(s) mu_i(s)`.
pub fn expectation(g: &Game, i: usize, p: &MixedProfile) -> Result<Scalar> {
    check_compat(g, i, p)?;
    Ok(CostSource::expectation(g, i, p))
}

/// Definitional `k`-moment `kM_i(p) = sum_s p(s) (mu_i(s) - E_i(p))^k`,
/// evaluated by full profile enumeration. This is the oracle against which
/// the scheduling moment formula is checked.
pub fn k_moment(g: &Game, i: usize, p: &MixedProfile, k: u32) -> Result<Scalar> {
    check_compat(g, i, p)?;
    let mean = CostSource::expectation(g, i, p);
    Ok(g.central_moment_about(i, p, k, &mean))
}

/// Evaluates `spec` on a cost source. Roots force float mode unless the
/// radicand happens to be a perfect power of a rational.
pub fn valuation_on<S: CostSource + ?Sized>(
    spec: &ValuationSpec,
    src: &S,
    i: usize,
    p: &MixedProfile,
) -> Result<Scalar> {
    check_compat(src, i, p)?;
    if spec.needs_nonnegative_costs() && src.has_negative_cost() {
        return Err(Error::InvalidParameter(
            "power-mean valuations need nonnegative costs".into(),
        ));
    }
    let mode = src.mode();
    let conv = |r: &BigRational| Scalar::from_rational(r, mode);
    Ok(match spec {
        ValuationSpec::Expectation => src.expectation(i, p),
        ValuationSpec::VarRisk { gamma } => {
            let e = src.expectation(i, p);
            let var = src.central_moment_about(i, p, 2, &e);
            &e + &(conv(gamma) * var)
        }
        ValuationSpec::SdRisk { gamma } => {
            let e = src.expectation(i, p);
            let var = src.central_moment_about(i, p, 2, &e);
            &e + &(conv(gamma) * var.sqrt()?)
        }
        ValuationSpec::MomentSum { alpha0, alpha } => {
            let e = src.expectation(i, p);
            let mut acc = conv(alpha0) * &e;
            for (&k, a) in alpha {
                if a.is_zero() {
                    continue;
                }
                acc = acc + conv(a) * src.central_moment_about(i, p, k, &e);
            }
            acc
        }
        ValuationSpec::NuPower { r } => src.raw_power_mean(i, p, *r).nth_root(*r)?,
        ValuationSpec::Combo { lambda, gamma, r } => {
            let e = src.expectation(i, p);
            let var = src.central_moment_about(i, p, 2, &e);
            let mv = &e + &(conv(gamma) * var);
            let nu = src.raw_power_mean(i, p, *r).nth_root(*r)?;
            let l = conv(lambda);
            let one = Scalar::one(mode);
            &l * &mv + (one - l) * nu
        }
    })
}

/// Evaluates `spec` on a game by full enumeration.
pub fn valuation(spec: &ValuationSpec, g: &Game, i: usize, p: &MixedProfile) -> Result<Scalar> {
    valuation_on(spec, g, i, p)
}

/// Risk term `R_i(p) = V_i(p) - E_i(p)`.
pub fn risk(spec: &ValuationSpec, g: &Game, i: usize, p: &MixedProfile) -> Result<Scalar> {
    let v = valuation_on(spec, g, i, p)?;
    Ok(v - CostSource::expectation(g, i, p))
}

/// Value of `spec` when the player's cost is the constant `c`, as happens at
/// pure profiles: the risk term vanishes on constant costs, leaving `c` for
/// every `E + R` form and `alpha0 * c` for moment sums.
pub fn value_at_pure_cost(spec: &ValuationSpec, c: &Scalar) -> Scalar {
    match spec {
        ValuationSpec::MomentSum { alpha0, .. } => Scalar::from_rational(alpha0, c.mode()) * c,
        _ => c.clone(),
    }
}

/// A cost taking value `b` with probability `q` and `a` with `1 - q`,
/// `a <= b`.
#[derive(Clone, Debug)]
pub struct TwoValueDist {
    pub a: Scalar,
    pub b: Scalar,
    pub q: Scalar,
}

impl TwoValueDist {
    pub fn new(a: Scalar, b: Scalar, q: Scalar) -> Result<TwoValueDist> {
        if a.mode() != b.mode() || a.mode() != q.mode() {
            return Err(Error::ModeMismatch("two-value parameters mix modes".into()));
        }
        if a > b {
            return Err(Error::InvalidParameter(format!("need a <= b, got a={a}, b={b}")));
        }
        let mode = a.mode();
        if !q.is_nonnegative_tol(0.0) || q > Scalar::one(mode) {
            return Err(Error::InvalidParameter(format!("q={q} outside [0,1]")));
        }
        Ok(TwoValueDist { a, b, q })
    }

    fn mode(&self) -> Mode {
        self.a.mode()
    }

    /// `E = a + q (b - a)`.
    pub fn mean(&self) -> Scalar {
        &self.a + &(&self.q * &(&self.b - &self.a))
    }
}

/// Closed-form valuation `V(a,b,q)` of a two-value cost distribution.
pub fn two_value_v(spec: &ValuationSpec, d: &TwoValueDist) -> Result<Scalar> {
    let mode = d.mode();
    let conv = |r: &BigRational| Scalar::from_rational(r, mode);
    let one = Scalar::one(mode);
    let gap = &d.b - &d.a;
    let q1q = &d.q * &(&one - &d.q);
    let mean = d.mean();
    Ok(match spec {
        ValuationSpec::Expectation => mean,
        ValuationSpec::VarRisk { gamma } => mean + conv(gamma) * q1q * gap.powi(2),
        ValuationSpec::SdRisk { gamma } => mean + conv(gamma) * q1q.sqrt()? * gap,
        ValuationSpec::MomentSum { alpha0, alpha } => {
            let mut acc = conv(alpha0) * &mean;
            for (&k, a) in alpha {
                acc = acc + conv(a) * moment_hat(&d.q, &gap, k);
            }
            acc
        }
        ValuationSpec::NuPower { r } => nu_hat(d, *r)?,
        ValuationSpec::Combo { lambda, gamma, r } => {
            let mv = mean + conv(gamma) * q1q * gap.powi(2);
            let nu = nu_hat(d, *r)?;
            let l = conv(lambda);
            &l * &mv + (one - l) * nu
        }
    })
}

/// Closed-form risk `R(a,b,q) = V(a,b,q) - E(a,b,q)`.
pub fn two_value_r(spec: &ValuationSpec, d: &TwoValueDist) -> Result<Scalar> {
    Ok(two_value_v(spec, d)? - d.mean())
}

/// `q (1-q) gap^k (q^{k-1} + (1-q)^{k-1})`: the two-value `k`-moment.
fn moment_hat(q: &Scalar, gap: &Scalar, k: u32) -> Scalar {
    let one = Scalar::one(q.mode());
    let q1 = &one - q;
    q * &q1 * gap.powi(k) * (q.powi(k - 1) + q1.powi(k - 1))
}

fn nu_hat(d: &TwoValueDist, r: u32) -> Result<Scalar> {
    if !d.a.is_nonnegative_tol(0.0) {
        return Err(Error::InvalidParameter(
            "power-mean valuations need nonnegative values".into(),
        ));
    }
    let one = Scalar::one(d.mode());
    ((&d.q * &d.b.powi(r)) + (one - &d.q) * d.a.powi(r)).nth_root(r)
}

/// Samples segments in player `i`'s strategy simplex and checks concavity of
/// `spec` along them; returns a human-readable description of the first
/// violation found, if any. This is the numeric spot-check backing the
/// caller-asserted concavity of moment sums.
pub fn concavity_spot_check(
    spec: &ValuationSpec,
    g: &Game,
    i: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<String>> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let counts = g.strategy_counts();
    let mode = Game::mode(g);
    for _ in 0..trials {
        let base = crate::sampling::random_mixed_profile(&mut rng, &counts, mode, 16);
        let own1 = crate::sampling::random_simplex(&mut rng, counts[i], mode, 16);
        let own2 = crate::sampling::random_simplex(&mut rng, counts[i], mode, 16);
        let lam_num = rng.gen_range(1..16i64);
        let lambda = Scalar::from_ratio(lam_num, 16, mode);
        let mut p1 = base.clone();
        p1.strategies[i] = own1.clone();
        let mut p2 = base.clone();
        p2.strategies[i] = own2.clone();
        let mut pmid = base.clone();
        pmid.strategies[i] = own1
            .iter()
            .zip(&own2)
            .map(|(x, y)| &lambda * x + (Scalar::one(mode) - &lambda) * y)
            .collect();
        let v1 = valuation_on(spec, g, i, &p1)?;
        let v2 = valuation_on(spec, g, i, &p2)?;
        let vm = valuation_on(spec, g, i, &pmid)?;
        let hull = &lambda * &v1 + (Scalar::one(mode) - &lambda) * &v2;
        let slack = &vm - &hull;
        if !slack.is_nonnegative_tol(tol) {
            return Ok(Some(format!(
                "concavity violated: V(mid)={vm} < combination {hull} at lambda={lambda}, p'={p1}, p''={p2}",
            )));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::support;
    use crate::scalar::big_ratio;

    fn exact(p: i64, q: i64) -> Scalar {
        Scalar::from_ratio(p, q, Mode::Exact)
    }

    /// One-player, two-strategy synthetic game giving player 0 the two-value
    /// cost distribution `d` when the single opponent mixes.
    fn two_value_game(a: &Scalar, b: &Scalar) -> Game {
        Game::from_cost_fn(
            vec![vec!["me".into()], vec!["lo".into(), "hi".into()]],
            |s| {
                let c = if s[1] == 0 { a.clone() } else { b.clone() };
                vec![c.clone(), c]
            },
        )
        .unwrap()
    }

    fn dist_profile(g: &Game, q: &Scalar) -> MixedProfile {
        let mode = q.mode();
        MixedProfile::new(vec![
            vec![Scalar::one(mode)],
            vec![Scalar::one(mode) - q, q.clone()],
        ])
    }

    #[test]
    fn expectation_of_pure_profile_is_cost() {
        let g = crate::game::tests::two_by_two(Mode::Exact);
        let p = MixedProfile::pure(&g.strategy_counts(), &[0, 1], Mode::Exact);
        assert_eq!(expectation(&g, 0, &p).unwrap(), g.cost(0, &[0, 1]).clone());
    }

    #[test]
    fn zeroth_and_first_moments() {
        let g = crate::game::tests::two_by_two(Mode::Exact);
        let p = MixedProfile::uniform(&g.strategy_counts(), Mode::Exact);
        assert_eq!(k_moment(&g, 0, &p, 0).unwrap(), exact(1, 1));
        assert_eq!(k_moment(&g, 1, &p, 1).unwrap(), exact(0, 1));
    }

    #[test]
    fn second_moment_of_half_half_two_value() {
        // cost 1 w.p. 1/2, 2 w.p. 1/2; independent oracle:
        // q(1-q)(b-a)^k (q^{k-1}+(1-q)^{k-1}) at q=1/2, k=2 gives 1/4.
        let g = two_value_game(&exact(1, 1), &exact(2, 1));
        let p = dist_profile(&g, &exact(1, 2));
        assert_eq!(k_moment(&g, 0, &p, 2).unwrap(), exact(1, 4));
    }

    #[test]
    fn valuation_examples_two_value() {
        let g = two_value_game(&exact(1, 1), &exact(2, 1));
        let p = dist_profile(&g, &exact(1, 2));
        let var1 = ValuationSpec::var(big_ratio(1, 1)).unwrap();
        assert_eq!(valuation(&var1, &g, 0, &p).unwrap(), exact(7, 4));

        let nu2 = ValuationSpec::nu_power(2).unwrap();
        let gf = two_value_game(&Scalar::Float(1.0), &Scalar::Float(2.0));
        let pf = dist_profile(&gf, &Scalar::Float(0.5));
        let v = valuation(&nu2, &gf, 0, &pf).unwrap();
        assert!(v.approx_eq(&Scalar::Float(1.5811388300841898), 1e-8));

        // exact mode must refuse the root since 5/2 is not a perfect square
        assert!(matches!(
            valuation(&nu2, &g, 0, &p),
            Err(Error::InexactRoot(_))
        ));
    }

    #[test]
    fn risk_examples() {
        let g = two_value_game(&exact(1, 1), &exact(2, 1));
        let p = dist_profile(&g, &exact(1, 2));
        // pure profile: risk 0
        let var1 = ValuationSpec::var(big_ratio(1, 1)).unwrap();
        let pure = dist_profile(&g, &exact(0, 1));
        assert_eq!(risk(&var1, &g, 0, &pure).unwrap(), exact(0, 1));
        // SD with gamma=2 at q=1/2: 2*sqrt(1/4)*1 = 1, exact because the
        // radicand is a perfect square
        let sd2 = ValuationSpec::sd(big_ratio(2, 1)).unwrap();
        assert_eq!(risk(&sd2, &g, 0, &p).unwrap(), exact(1, 1));
    }

    #[test]
    fn nu_risk_closed_form_matches_game_route() {
        // cost 1 w.p. 1-q, 1+2d w.p. q; R = (q(1+2d)^r + 1-q)^(1/r) - 1 - 2qd
        let r = 3u32;
        let d = 0.125f64;
        let q = 0.3f64;
        let spec = ValuationSpec::nu_power(r).unwrap();
        let g = two_value_game(&Scalar::Float(1.0), &Scalar::Float(1.0 + 2.0 * d));
        let p = dist_profile(&g, &Scalar::Float(q));
        let got = risk(&spec, &g, 0, &p).unwrap();
        let expect = (q * (1.0 + 2.0 * d).powi(r as i32) + (1.0 - q)).powf(1.0 / r as f64)
            - 1.0
            - q * 2.0 * d;
        assert!(got.approx_eq(&Scalar::Float(expect), 1e-12));
    }

    #[test]
    fn two_value_forms() {
        let var1 = ValuationSpec::var(big_ratio(1, 1)).unwrap();
        // degenerate q: no risk
        for q in [0i64, 1] {
            let d = TwoValueDist::new(exact(1, 1), exact(2, 1), exact(q, 1)).unwrap();
            assert_eq!(two_value_r(&var1, &d).unwrap(), exact(0, 1));
            assert_eq!(
                two_value_v(&var1, &d).unwrap(),
                if q == 0 { exact(1, 1) } else { exact(2, 1) }
            );
        }
        // V(1,2,q) = q + 1 + q(1-q) for gamma=1
        let q = exact(3, 10);
        let d = TwoValueDist::new(exact(1, 1), exact(2, 1), q.clone()).unwrap();
        let expect = &q + &exact(1, 1) + &q * &(exact(1, 1) - &q);
        assert_eq!(two_value_v(&var1, &d).unwrap(), expect);
        // R(1, 1+2d, q) = 4 d^2 q (1-q) <= gamma d^2
        let delta = exact(1, 8);
        let b = exact(1, 1) + exact(2, 1) * &delta;
        let d2 = TwoValueDist::new(exact(1, 1), b, q.clone()).unwrap();
        let expect = exact(4, 1) * delta.powi(2) * &q * (exact(1, 1) - &q);
        assert_eq!(two_value_r(&var1, &d2).unwrap(), expect);
    }

    #[test]
    fn two_value_matches_game_valuation() {
        // oracle consistency on a synthetic 2-profile game
        let specs = vec![
            ValuationSpec::Expectation,
            ValuationSpec::var(big_ratio(2, 3)).unwrap(),
            ValuationSpec::moment_sum(
                big_ratio(1, 1),
                [(2u32, big_ratio(1, 1)), (4u32, big_ratio(1, 2)), (8u32, big_ratio(1, 5))]
                    .into_iter()
                    .collect(),
            )
            .unwrap(),
        ];
        for spec in &specs {
            for (a, b, q) in [(1, 3, exact(1, 4)), (0, 2, exact(2, 5)), (2, 2, exact(1, 3))] {
                let dist = TwoValueDist::new(exact(a, 1), exact(b, 1), q.clone()).unwrap();
                let g = two_value_game(&exact(a, 1), &exact(b, 1));
                let p = dist_profile(&g, &q);
                assert_eq!(
                    two_value_v(spec, &dist).unwrap(),
                    valuation(spec, &g, 0, &p).unwrap(),
                    "spec {spec}"
                );
                assert_eq!(
                    two_value_r(spec, &dist).unwrap(),
                    risk(spec, &g, 0, &p).unwrap(),
                    "spec {spec}"
                );
            }
        }
    }

    #[test]
    fn risk_positive_iff_cost_varies_on_support() {
        let g = two_value_game(&exact(1, 1), &exact(2, 1));
        let var1 = ValuationSpec::var(big_ratio(1, 1)).unwrap();
        let mixed = dist_profile(&g, &exact(1, 3));
        assert!(risk(&var1, &g, 0, &mixed).unwrap() > exact(0, 1));
        let sup = support(&mixed, 0.0);
        assert_eq!(sup.0[1].len(), 2);
        let point = dist_profile(&g, &exact(1, 1));
        assert_eq!(risk(&var1, &g, 0, &point).unwrap(), exact(0, 1));
    }

    #[test]
    fn spec_parsing_round_trip() {
        for text in [
            "e",
            "e+var:gamma=1",
            "e+sd:gamma=3/2",
            "moments:a0=1,a2=1,a4=1/2",
            "nu:r=3",
            "combo:lambda=1/2,gamma=1,r=2",
        ] {
            let spec = ValuationSpec::parse(text).unwrap();
            let json = serde_json::to_string(&spec).unwrap();
            let back: ValuationSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back, "text {text}");
            let reparsed = ValuationSpec::parse(&spec.to_string()).unwrap();
            assert_eq!(spec, reparsed);
        }
        assert!(ValuationSpec::parse("e+var:gamma=0").is_err());
        assert!(ValuationSpec::parse("nu:r=1").is_err());
        assert!(ValuationSpec::parse("moments:a3=1").is_err());
    }

    #[test]
    fn momentsum_concavity_spot_check_passes_for_variance() {
        let spec = ValuationSpec::moment_sum(
            big_ratio(1, 1),
            [(2u32, big_ratio(1, 1))].into_iter().collect(),
        )
        .unwrap();
        let g = crate::game::tests::two_by_two(Mode::Exact);
        assert!(concavity_spot_check(&spec, &g, 0, 50, 0, 0.0).unwrap().is_none());
    }
}

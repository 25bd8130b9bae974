//! Deterministic random generators for fuzzing suites: simplex points with
//! small rational coordinates, mixed profiles, and small cost tensors.

use rand::Rng;

use crate::game::{Game, MixedProfile};
use crate::scalar::{Mode, Scalar};

/// Random probability vector whose entries are multiples of `1/denom`.
/// Exact-mode points are honest rationals, so exact suites stay exact.
pub fn random_simplex<R: Rng>(rng: &mut R, m: usize, mode: Mode, denom: u64) -> Vec<Scalar> {
    let mut buckets = vec![0u64; m];
    for _ in 0..denom {
        buckets[rng.gen_range(0..m)] += 1;
    }
    buckets
        .into_iter()
        .map(|k| Scalar::from_ratio(k as i64, denom as i64, mode))
        .collect()
}

/// Random mixed profile on the given strategy counts.
pub fn random_mixed_profile<R: Rng>(
    rng: &mut R,
    counts: &[usize],
    mode: Mode,
    denom: u64,
) -> MixedProfile {
    MixedProfile::new(
        counts
            .iter()
            .map(|&m| random_simplex(rng, m, mode, denom))
            .collect(),
    )
}

/// Random dense game with rational costs `num/den`, `num` drawn from
/// `lo..=hi` (set `lo >= 0` for valuations that need nonnegative costs).
pub fn random_game<R: Rng>(
    rng: &mut R,
    counts: &[usize],
    lo: i64,
    hi: i64,
    den: i64,
    mode: Mode,
) -> Game {
    let labels: Vec<Vec<String>> = counts
        .iter()
        .map(|&m| (0..m).map(|s| format!("s{s}")).collect())
        .collect();
    let total: usize = counts.iter().product();
    let n = counts.len();
    let cells: Vec<Vec<Scalar>> = (0..total)
        .map(|_| {
            (0..n)
                .map(|_| Scalar::from_ratio(rng.gen_range(lo..=hi), den, mode))
                .collect()
        })
        .collect();
    let strides = {
        let mut s = vec![1usize; n];
        for i in (0..n - 1).rev() {
            s[i] = s[i + 1] * counts[i + 1];
        }
        s
    };
    Game::from_cost_fn(labels, |profile| {
        let flat: usize = profile.iter().zip(&strides).map(|(p, s)| p * s).sum();
        cells[flat].clone()
    })
    .expect("random game is well-formed")
}

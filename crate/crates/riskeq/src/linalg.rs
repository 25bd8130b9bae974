//! Small exact Gaussian elimination over rationals, used by the
//! support-enumeration solver.

use num::{BigRational, Zero};

/// Outcome of solving `A x = b` exactly.
#[derive(Debug)]
pub enum LinearSolution {
    /// No solution.
    Infeasible,
    /// Exactly one solution.
    Unique(Vec<BigRational>),
    /// Solution affine subspace of positive dimension; carries the matrix
    /// rank so callers can enumerate basic solutions.
    Underdetermined { rank: usize },
}

/// Row-reduces the augmented system in place and classifies it.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> LinearSolution {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(rank, pivot_row);
        let pivot = aug[rank][col].clone();
        for entry in aug[rank].iter_mut() {
            *entry = &*entry / &pivot;
        }
        for r in 0..rows {
            if r != rank && !aug[r][col].is_zero() {
                let factor = aug[r][col].clone();
                for c in col..=cols {
                    let delta = &factor * &aug[rank][c];
                    aug[r][c] = &aug[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }

    // inconsistent row: 0 = nonzero
    for r in rank..rows {
        if !aug[r][cols].is_zero() {
            return LinearSolution::Infeasible;
        }
    }

    if rank < cols {
        return LinearSolution::Underdetermined { rank };
    }

    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    LinearSolution::Unique(x)
}

/// Solves `A x = b` restricted to the columns in `basis` (all other
/// coordinates zero). Returns the full-length solution when it is unique and
/// consistent.
pub fn solve_on_basis(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    basis: &[usize],
    cols: usize,
) -> Option<Vec<BigRational>> {
    let sub: Vec<Vec<BigRational>> = a
        .iter()
        .map(|row| basis.iter().map(|&c| row[c].clone()).collect())
        .collect();
    match solve(&sub, b) {
        LinearSolution::Unique(xs) => {
            let mut full = vec![BigRational::zero(); cols];
            for (&c, v) in basis.iter().zip(xs) {
                full[c] = v;
            }
            Some(full)
        }
        _ => None,
    }
}

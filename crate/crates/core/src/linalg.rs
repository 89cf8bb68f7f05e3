//! Exact Gaussian elimination over GF(q).
//!
//! Matrices are dense row vectors of field elements. Everything here is
//! small (dimensions bounded by block lengths at desk scale), so the
//! implementations favor clarity over asymptotics.

use crate::field::Field;

/// Outcome of solving a linear system A x = b.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(Vec<u16>),
    /// Consistent but with a free variable: more than one solution.
    Underdetermined,
    Inconsistent,
}

/// Reduces `mat` to reduced row echelon form in place; returns pivot columns.
#[allow(clippy::needless_range_loop)]
pub fn rref(f: &Field, mat: &mut [Vec<u16>]) -> Vec<usize> {
    let rows = mat.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = mat[0].len();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(src) = (row..rows).find(|&r| mat[r][col] != 0) else {
            continue;
        };
        mat.swap(row, src);
        let lead_inv = f.inv(mat[row][col]).expect("pivot is nonzero");
        for c in col..cols {
            mat[row][c] = f.mul(mat[row][c], lead_inv);
        }
        for r in 0..rows {
            if r != row && mat[r][col] != 0 {
                let factor = mat[r][col];
                for c in col..cols {
                    let delta = f.mul(factor, mat[row][c]);
                    mat[r][c] = f.sub(mat[r][c], delta);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank(f: &Field, mat: &[Vec<u16>]) -> usize {
    let mut work: Vec<Vec<u16>> = mat.to_vec();
    rref(f, &mut work).len()
}

/// Solves A x = b for x, where `a` has one row per equation.
pub fn solve(f: &Field, a: &[Vec<u16>], b: &[u16]) -> SolveOutcome {
    assert_eq!(a.len(), b.len(), "one right-hand side entry per equation");
    let cols = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<u16>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    if aug.is_empty() {
        // No constraints: unique only if there are no variables.
        return if cols == 0 {
            SolveOutcome::Unique(Vec::new())
        } else {
            SolveOutcome::Underdetermined
        };
    }
    let pivots = rref(f, &mut aug);
    if pivots.last().is_some_and(|&c| c == cols) {
        return SolveOutcome::Inconsistent;
    }
    if pivots.len() < cols {
        return SolveOutcome::Underdetermined;
    }
    // Pivot in every variable column: read the solution off the RREF.
    let mut x = vec![0u16; cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][cols];
    }
    SolveOutcome::Unique(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_identifies_rank() {
        let f = Field::new(2).unwrap();
        let mat = vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]];
        assert_eq!(rank(&f, &mat), 2);
        assert_eq!(rank(&f, &[vec![0, 0, 0]]), 0);
    }

    #[test]
    fn solve_unique_case() {
        let f = Field::new(5).unwrap();
        // x + 2y = 3, 2x + y = 3  =>  x = 1, y = 1 (determinant 2).
        let a = vec![vec![1, 2], vec![2, 1]];
        assert_eq!(solve(&f, &a, &[3, 3]), SolveOutcome::Unique(vec![1, 1]));
    }

    #[test]
    fn solve_detects_inconsistent_and_underdetermined() {
        let f = Field::new(2).unwrap();
        let a = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(solve(&f, &a, &[0, 1]), SolveOutcome::Inconsistent);
        assert_eq!(solve(&f, &a, &[1, 1]), SolveOutcome::Underdetermined);
    }

    #[test]
    fn solve_over_extension_field() {
        let f = Field::new(4).unwrap();
        // In GF(4) with elements {0,1,2,3}: 2 * x = 1 => x = inv(2) = 3... check table: 2*3 = 1.
        assert_eq!(solve(&f, &[vec![2]], &[1]), SolveOutcome::Unique(vec![3]));
    }
}

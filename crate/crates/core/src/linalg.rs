//! Exact linear algebra over the rationals and over F₃.

use num_traits::{One, Zero};

use crate::gf3::{Trit, TritVector};
use crate::Rational;

/// Reduces the augmented matrix `[a | b]` to reduced row echelon form.
///
/// Returns the pivot column of each pivot row, or `None` if the system is
/// inconsistent.
fn rref(a: &mut [Vec<Rational>], b: &mut [Rational]) -> Option<Vec<usize>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        b.swap(row, p);

        let inv = Rational::one() / &a[row][col];
        for v in a[row][col..].iter_mut() {
            *v *= &inv;
        }
        b[row] *= &inv;

        let (pivot_row, pivot_b) = (a[row].clone(), b[row].clone());
        for r in 0..rows {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for (v, pv) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            b[r] -= &factor * &pivot_b;
        }
        pivots.push(col);
        row += 1;
    }
    if b[row..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    Some(pivots)
}

/// Solves the square system `a·x = b` exactly. `None` when `a` is singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n, "square system");
    let pivots = rref(&mut a, &mut b)?;
    if pivots.len() < n {
        return None;
    }
    Some(b)
}

/// Rank of a rational matrix.
pub fn rank(mut a: Vec<Vec<Rational>>) -> usize {
    let mut b = vec![Rational::zero(); a.len()];
    rref(&mut a, &mut b).map_or(0, |p| p.len())
}

/// Finds coefficients `c` with `Σⱼ cⱼ·columns[j] = target`, if any exist.
///
/// Free variables are set to zero.
pub fn solve_in_span(columns: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|r| columns.iter().map(|c| c[r].clone()).collect())
        .collect();
    let mut b = target.to_vec();
    let pivots = rref(&mut a, &mut b)?;
    let mut x = vec![Rational::zero(); columns.len()];
    for (row, &col) in pivots.iter().enumerate() {
        x[col] = b[row].clone();
    }
    Some(x)
}

/// Rank of a matrix over F₃.
pub fn rank_mod3(rows: &[TritVector]) -> usize {
    let mut m: Vec<Vec<Trit>> = rows.iter().map(|r| r.entries().to_vec()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        if rank == m.len() {
            break;
        }
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        // inverse of 1 is 1, of 2 is 2
        let inv = m[rank][col];
        let pivot: Vec<Trit> = m[rank].iter().map(|&t| t * inv).collect();
        m[rank] = pivot.clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col];
                for (v, &pv) in row.iter_mut().zip(&pivot) {
                    *v = *v - factor * pv;
                }
            }
        }
        rank += 1;
    }
    rank
}

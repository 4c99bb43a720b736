//! Smith normal form of integer matrices.
//!
//! Elimination runs on `i64` with checked arithmetic first and restarts on
//! arbitrary-precision integers if any intermediate entry overflows.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Sparse integer matrix given by `(row, col, value)` triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, i64)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            m[r][c] += v;
        }
        m
    }

    /// `self * other`, dense.
    pub fn mul_dense(&self, other: &SparseMatrix) -> Vec<Vec<i64>> {
        assert_eq!(self.cols, other.rows);
        let b = other.to_dense();
        let mut out = vec![vec![0i64; other.cols]; self.rows];
        for &(r, k, v) in &self.entries {
            for (c, &w) in b[k].iter().enumerate() {
                out[r][c] += v * w;
            }
        }
        out
    }
}

trait Scalar: Clone {
    fn is_zero(&self) -> bool;
    /// `|self| < |other|`
    fn smaller(&self, other: &Self) -> bool;
    /// `self - q * x`
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self>;
    fn add(&self, x: &Self) -> Option<Self>;
    /// Truncated quotient, so the remainder is smaller than the divisor.
    fn quot(&self, d: &Self) -> Option<Self>;
    fn divides(&self, x: &Self) -> bool;
    fn magnitude(&self) -> BigUint;
}

impl Scalar for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn smaller(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*x)?)
    }
    fn add(&self, x: &Self) -> Option<Self> {
        self.checked_add(*x)
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        self.checked_div(*d)
    }
    fn divides(&self, x: &Self) -> bool {
        (x.checked_rem(*self) == Some(0)) || (*self == -1)
    }
    fn magnitude(&self) -> BigUint {
        BigUint::from(self.unsigned_abs())
    }
}

impl Scalar for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn smaller(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn sub_mul(&self, q: &Self, x: &Self) -> Option<Self> {
        Some(self - q * x)
    }
    fn add(&self, x: &Self) -> Option<Self> {
        Some(self + x)
    }
    fn quot(&self, d: &Self) -> Option<Self> {
        Some(self / d)
    }
    fn divides(&self, x: &Self) -> bool {
        x.is_multiple_of(self)
    }
    fn magnitude(&self) -> BigUint {
        self.abs().to_biguint().expect("absolute value is non-negative")
    }
}

struct Overflow;

fn row_sub<T: Scalar>(m: &mut [Vec<T>], target: usize, src: usize, q: &T, from: usize) -> Result<(), Overflow> {
    let (a, b) = if target < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for k in from..b.len() {
        if !b[k].is_zero() {
            a[k] = a[k].sub_mul(q, &b[k]).ok_or(Overflow)?;
        }
    }
    Ok(())
}

fn col_sub<T: Scalar>(m: &mut [Vec<T>], target: usize, src: usize, q: &T, from: usize) -> Result<(), Overflow> {
    for row in m.iter_mut().skip(from) {
        if !row[src].is_zero() {
            row[target] = row[target].sub_mul(q, &row[src]).ok_or(Overflow)?;
        }
    }
    Ok(())
}

fn row_add<T: Scalar>(m: &mut [Vec<T>], target: usize, src: usize, from: usize) -> Result<(), Overflow> {
    let src_row = m[src].clone();
    for k in from..src_row.len() {
        if !src_row[k].is_zero() {
            m[target][k] = m[target][k].add(&src_row[k]).ok_or(Overflow)?;
        }
    }
    Ok(())
}

fn swap_cols<T>(m: &mut [Vec<T>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

/// Nonzero diagonal of the Smith normal form, as magnitudes.
fn diagonalize<T: Scalar>(mut m: Vec<Vec<T>>, rows: usize, cols: usize) -> Result<Vec<BigUint>, Overflow> {
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero() && pivot.is_none_or(|(pi, pj)| m[i][j].smaller(&m[pi][pj])) {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        swap_cols(&mut m, t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if !m[i][t].is_zero() {
                    let q = m[i][t].quot(&m[t][t]).ok_or(Overflow)?;
                    row_sub(&mut m, i, t, &q, t)?;
                    clean &= m[i][t].is_zero();
                }
            }
            for j in t + 1..cols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].quot(&m[t][t]).ok_or(Overflow)?;
                    col_sub(&mut m, j, t, &q, t)?;
                    clean &= m[t][j].is_zero();
                }
            }
            if !clean {
                // a remainder is now smaller than the pivot; bring it in
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !m[i][t].is_zero() && m[i][t].smaller(&m[best.0][best.1]) {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !m[t][j].is_zero() && m[t][j].smaller(&m[best.0][best.1]) {
                        best = (t, j);
                    }
                }
                m.swap(t, best.0);
                swap_cols(&mut m, t, best.1);
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !m[t][t].divides(&m[i][j])));
            match offender {
                Some(i) => row_add(&mut m, t, i, t)?,
                None => break,
            }
        }
        diag.push(m[t][t].magnitude());
        t += 1;
    }
    Ok(diag)
}

/// Invariant factors (nonzero diagonal entries of the Smith normal form) in
/// divisibility order.
pub fn invariant_factors(matrix: &SparseMatrix) -> Vec<BigUint> {
    if matrix.rows == 0 || matrix.cols == 0 || matrix.entries.is_empty() {
        return Vec::new();
    }
    let dense = matrix.to_dense();
    if let Ok(d) = diagonalize(dense.clone(), matrix.rows, matrix.cols) {
        return d;
    }
    let big: Vec<Vec<BigInt>> = dense.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect();
    match diagonalize(big, matrix.rows, matrix.cols) {
        Ok(d) => d,
        Err(Overflow) => unreachable!("big integers do not overflow"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        let mut m = SparseMatrix::new(rows.len(), rows.first().map_or(0, |r| r.len()));
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0 {
                    m.entries.push((i, j, v));
                }
            }
        }
        m
    }

    fn factors(rows: &[&[i64]]) -> Vec<u64> {
        invariant_factors(&mat(rows)).iter().map(|b| b.try_into().unwrap()).collect()
    }

    #[test]
    fn small_cases() {
        assert_eq!(factors(&[&[2, 0], &[0, 3]]), vec![1, 6]);
        assert_eq!(factors(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), vec![2, 6, 12]);
        assert_eq!(factors(&[&[0, 0], &[0, 0]]), Vec::<u64>::new());
        assert_eq!(factors(&[&[1, 1], &[1, 1]]), vec![1]);
        // boundary of a real projective plane style relation: Z/2 torsion
        assert_eq!(factors(&[&[2]]), vec![2]);
    }

    #[test]
    fn large_entries() {
        let big = i64::MAX / 2 + 1;
        let f = invariant_factors(&mat(&[&[big, 3], &[big - 1, 7]]));
        let det: BigInt = BigInt::from(big) * 7 - BigInt::from(big - 1) * 3;
        assert_eq!(f.len(), 2);
        assert_eq!(BigInt::from(f[0].clone() * f[1].clone()), det.abs());
    }
}

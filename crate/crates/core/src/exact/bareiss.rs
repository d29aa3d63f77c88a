//! Fraction-free elimination over the integers for rational matrices.
//!
//! Each row is cleared of denominators first; Bareiss' update then keeps
//! every intermediate entry an integer minor of the input, which bounds
//! coefficient growth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::dense::DenseMatrix;
use super::scalar::common_denominator;

struct Echelon {
    a: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    swaps: usize,
    /// Product of the per-row scale factors applied when clearing denominators.
    row_scale: BigInt,
}

fn integer_rows(m: &DenseMatrix<BigRational>) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let den = common_denominator(row);
            scale *= &den;
            row.iter()
                .map(|q| q.numer() * (&den / q.denom()))
                .collect()
        })
        .collect();
    (rows, scale)
}

fn echelon(m: &DenseMatrix<BigRational>) -> Echelon {
    let (mut a, row_scale) = integer_rows(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let piv = &pivot_row[c];
        for row in tail.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                let v = piv * &row[j] - &lead * &pivot_row[j];
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        // Rows above the pivot are untouched; entries left of `c` in later
        // rows are already zero.
        prev = piv.clone();
        pivots.push(c);
        r += 1;
    }
    Echelon { a, pivots, swaps, row_scale }
}

pub fn rank(m: &DenseMatrix<BigRational>) -> usize {
    echelon(m).pivots.len()
}

pub fn determinant(m: &DenseMatrix<BigRational>) -> BigRational {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return BigRational::one();
    }
    let e = echelon(m);
    if e.pivots.len() < n {
        return BigRational::zero();
    }
    let mut det = e.a[n - 1][n - 1].clone();
    if e.swaps % 2 == 1 {
        det = -det;
    }
    BigRational::new(det, e.row_scale)
}

/// Primitive integer basis of the null space, one vector per free column.
pub fn kernel_basis(m: &DenseMatrix<BigRational>) -> Vec<Vec<BigRational>> {
    let cols = m.cols();
    let e = echelon(m);
    let mut is_pivot = vec![false; cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&f| !is_pivot[f]) {
        let mut v = vec![BigRational::zero(); cols];
        v[f] = BigRational::one();
        for (row, &p) in e.pivots.iter().enumerate().rev() {
            let mut acc = BigRational::zero();
            for j in p + 1..cols {
                if !e.a[row][j].is_zero() && !v[j].is_zero() {
                    acc += BigRational::from_integer(e.a[row][j].clone()) * &v[j];
                }
            }
            v[p] = -acc / BigRational::from_integer(e.a[row][p].clone());
        }
        basis.push(primitive(v));
    }
    basis
}

/// Rescales a rational vector to coprime integers with a positive leading entry.
fn primitive(v: Vec<BigRational>) -> Vec<BigRational> {
    let den = common_denominator(&v);
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    let lead_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let g = if lead_negative { -g } else { g };
    ints.into_iter().map(|x| BigRational::from_integer(x / &g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::{Rational, Scalar};

    type M = DenseMatrix<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn kernel_of_zero_and_identity() {
        assert_eq!(kernel_basis(&M::zeros(2, 2)).len(), 2);
        assert!(kernel_basis(&M::identity(5)).is_empty());
    }

    #[test]
    fn kernel_with_fractions() {
        let m = M::from_rows(vec![
            vec![q(1, 2), q(1, 3), q(0, 1)],
            vec![q(1, 1), q(2, 3), q(0, 1)],
        ])
        .unwrap();
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
        }
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = M::from_rows(vec![
            vec![q(1, 2), q(3, 1), q(0, 1)],
            vec![q(2, 1), q(-1, 3), q(5, 1)],
            vec![q(0, 1), q(1, 1), q(7, 4)],
        ])
        .unwrap();
        let a = |i: usize, j: usize| m[(i, j)].clone();
        let cofactor = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        assert_eq!(determinant(&m), cofactor);
        assert_eq!(determinant(&M::from_i64(&[&[0, 1], &[1, 0]])), q(-1, 1));
    }
}

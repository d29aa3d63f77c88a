//! Generic elimination routines. Exact scalars route kernel, rank and
//! determinant through the fraction-free variants in `bareiss`; inertia is
//! shared.

use super::dense::DenseMatrix;
use super::scalar::Scalar;
use crate::error::{Error, Result};

fn abs_f64<T: Scalar>(x: &T) -> f64 {
    x.to_f64_lossy().abs()
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref<T: Scalar>(a: &mut DenseMatrix<T>, tol: f64) -> Vec<usize> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !a[(i, c)].near_zero(tol))
            .max_by(|&i, &j| abs_f64(&a[(i, c)]).total_cmp(&abs_f64(&a[(j, c)])));
        let Some(p) = best else { continue };
        if p != r {
            for j in 0..cols {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(r, j)].clone();
                a[(r, j)] = tmp;
            }
        }
        let inv = T::one() / a[(r, c)].clone();
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let v = a[(i, j)].clone() - f.clone() * a[(r, j)].clone();
                a[(i, j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Indices of a maximal linearly independent subset of the columns.
pub fn pivot_columns<T: Scalar>(m: &DenseMatrix<T>, tol: f64) -> Vec<usize> {
    let mut a = m.clone();
    rref(&mut a, tol)
}

pub fn kernel_by_elimination<T: Scalar>(m: &DenseMatrix<T>, tol: f64) -> Vec<Vec<T>> {
    let mut a = m.clone();
    let pivots = rref(&mut a, tol);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -a[(row, f)].clone();
            }
            v
        })
        .collect()
}

pub fn rank_by_elimination<T: Scalar>(m: &DenseMatrix<T>, tol: f64) -> usize {
    let mut a = m.clone();
    rref(&mut a, tol).len()
}

pub fn determinant_by_elimination<T: Scalar>(m: &DenseMatrix<T>, tol: f64) -> T {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut det = T::one();
    for c in 0..n {
        let best = (c..n)
            .filter(|&i| !a[(i, c)].near_zero(tol))
            .max_by(|&i, &j| abs_f64(&a[(i, c)]).total_cmp(&abs_f64(&a[(j, c)])));
        let Some(p) = best else { return T::zero() };
        if p != c {
            for j in 0..n {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(c, j)].clone();
                a[(c, j)] = tmp;
            }
            det = -det;
        }
        let piv = a[(c, c)].clone();
        det = det * piv.clone();
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone() / piv.clone();
            for j in c..n {
                let v = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                a[(i, j)] = v;
            }
        }
    }
    det
}

/// Inverse by Gauss–Jordan; `Singular` if the matrix has no inverse.
pub fn inverse<T: Scalar>(m: &DenseMatrix<T>, tol: f64) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), found: m.cols() });
    }
    let n = m.rows();
    let mut aug = DenseMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, n + i)] = T::one();
    }
    let pivots = rref(&mut aug, tol);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Err(Error::Singular(format!("{n}x{n} matrix is not invertible")));
    }
    let mut inv = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = aug[(i, n + j)].clone();
        }
    }
    Ok(inv)
}

/// Solves `m x = b` for square invertible `m`.
pub fn solve<T: Scalar>(m: &DenseMatrix<T>, b: &[T], tol: f64) -> Result<Vec<T>> {
    inverse(m, tol)?.mul_vec(b)
}

/// Sylvester inertia `(neg, zero, pos)` of a symmetric matrix.
///
/// Symmetric Gaussian elimination: a nonzero diagonal pivot is used
/// directly; if every remaining diagonal entry vanishes but some `a_ij`
/// does not, the congruence `e_i ← e_i + e_j` creates the diagonal entry
/// `2 a_ij`. Every step is a congruence, so the inertia is preserved.
pub fn inertia<T: Scalar>(g: &DenseMatrix<T>, tol: f64) -> Result<(usize, usize, usize)> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch { expected: g.rows(), found: g.cols() });
    }
    let n = g.rows();
    for i in 0..n {
        for j in i + 1..n {
            if !(g[(i, j)].clone() - g[(j, i)].clone()).near_zero(tol) {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a = g.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let (mut neg, mut pos) = (0, 0);
    while !active.is_empty() {
        let diag = active
            .iter()
            .copied()
            .filter(|&i| !a[(i, i)].near_zero(tol))
            .max_by(|&i, &j| abs_f64(&a[(i, i)]).total_cmp(&abs_f64(&a[(j, j)])));
        let p = match diag {
            Some(p) => p,
            None => {
                let mut best: Option<(usize, usize)> = None;
                for (x, &i) in active.iter().enumerate() {
                    for &j in &active[x + 1..] {
                        if a[(i, j)].near_zero(tol) {
                            continue;
                        }
                        let better = match best {
                            None => true,
                            Some((bi, bj)) => abs_f64(&a[(i, j)]) > abs_f64(&a[(bi, bj)]),
                        };
                        if better {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((i, j)) = best else { break };
                // row/column i += row/column j
                for k in 0..n {
                    let v = a[(i, k)].clone() + a[(j, k)].clone();
                    a[(i, k)] = v;
                }
                for k in 0..n {
                    let v = a[(k, i)].clone() + a[(k, j)].clone();
                    a[(k, i)] = v;
                }
                i
            }
        };
        let d = a[(p, p)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if a[(i, p)].is_zero() {
                continue;
            }
            let f = a[(i, p)].clone() / d.clone();
            for &k in &active {
                let v = a[(i, k)].clone() - f.clone() * a[(p, k)].clone();
                a[(i, k)] = v;
            }
        }
        for &i in &active {
            a[(i, p)] = T::zero();
            a[(p, i)] = T::zero();
        }
    }
    Ok((neg, n - neg - pos, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = DenseMatrix<f64>;

    #[test]
    fn float_kernel_of_rank_one() {
        let m = M::from_i64(&[&[1, 2], &[2, 4]]);
        let k = kernel_by_elimination(&m, 1e-12);
        assert_eq!(k.len(), 1);
        let r = m.mul_vec(&k[0]).unwrap();
        assert!(r.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn float_inertia_of_hyperbolic_plane() {
        let m = M::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(inertia(&m, 1e-12).unwrap(), (1, 0, 1));
    }

    #[test]
    fn float_inverse() {
        let m = M::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = inverse(&m, 1e-12).unwrap();
        let id = m.mul(&inv).unwrap();
        assert!(id.max_abs_diff(&M::identity(2)) < 1e-12);
        assert!(inverse(&M::from_i64(&[&[1, 1], &[1, 1]]), 1e-12).is_err());
    }

    #[test]
    fn determinant_sign_from_swap() {
        let m = M::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant_by_elimination(&m, 1e-12), -1.0);
    }
}

//! Exact scalars, matrices and indefinite inner products.

pub mod bareiss;
pub mod dense;
pub mod linalg;
pub mod metric;
pub mod scalar;
pub mod scaled;
pub mod serial;
pub mod signed_perm;

pub use dense::DenseMatrix;
pub use metric::{pseudo_inner, Metric};
pub use scalar::{format_rational, parse_rational, Rational, Scalar};
pub use scaled::ScaledVector;
pub use signed_perm::SignedPermMatrix;

use crate::error::{Error, Result};

fn check_square<T: Scalar>(q: &DenseMatrix<T>, g: &Metric) -> Result<()> {
    if !q.is_square() || q.rows() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: q.rows() });
    }
    Ok(())
}

/// `J Q J` for diagonal `J`.
pub fn conjugate_by_metric<T: Scalar>(q: &DenseMatrix<T>, g: &Metric) -> DenseMatrix<T> {
    let mut out = q.clone();
    for i in 0..q.rows() {
        for j in 0..q.cols() {
            if g.sign(i) * g.sign(j) < 0 {
                out[(i, j)] = -out[(i, j)].clone();
            }
        }
    }
    out
}

/// `ᵗQ = J Q J`, compared entrywise with `near_zero` at the scalar's default tolerance.
pub fn is_symmetric_wrt<T: Scalar>(q: &DenseMatrix<T>, g: &Metric) -> Result<bool> {
    check_square(q, g)?;
    let lhs = q.transpose();
    let rhs = conjugate_by_metric(q, g);
    Ok(lhs.sub(&rhs)?.is_zero_within(T::default_tol()))
}

/// `ᵗA J A - J`.
pub fn pseudo_orthogonality_defect<T: Scalar>(a: &DenseMatrix<T>, g: &Metric) -> Result<DenseMatrix<T>> {
    check_square(a, g)?;
    let ja = conjugate_by_metric(a, g);
    // ᵗA J A = ᵗA (J A J) J, and right-multiplying by J flips columns.
    let mut prod = a.transpose().mul(&ja)?;
    for i in 0..prod.rows() {
        for j in 0..prod.cols() {
            if g.sign(j) < 0 {
                prod[(i, j)] = -prod[(i, j)].clone();
            }
        }
        let v = prod[(i, i)].clone() - T::ratio(g.sign(i) as i64, 1);
        prod[(i, i)] = v;
    }
    Ok(prod)
}

/// `ᵗA J A = J`; exact for rationals, default tolerance for floats.
pub fn is_pseudo_orthogonal<T: Scalar>(a: &DenseMatrix<T>, g: &Metric) -> Result<bool> {
    Ok(pseudo_orthogonality_defect(a, g)?.is_zero_within(T::default_tol()))
}

/// Basis of `{v : M v = 0}`.
pub fn kernel_basis<T: Scalar>(m: &DenseMatrix<T>) -> Vec<Vec<T>> {
    T::kernel_basis(m, T::default_tol())
}

pub fn rank<T: Scalar>(m: &DenseMatrix<T>) -> usize {
    T::rank(m, T::default_tol())
}

pub fn determinant<T: Scalar>(m: &DenseMatrix<T>) -> T {
    T::determinant(m, T::default_tol())
}

/// Inertia `(neg, zero, pos)` of a symmetric matrix.
pub fn signature_of_gram<T: Scalar>(g: &DenseMatrix<T>) -> Result<(usize, usize, usize)> {
    linalg::inertia(g, T::default_tol())
}

/// Gram matrix `(⟨v_i, v_j⟩)`.
pub fn gram_matrix<T: Scalar>(vs: &[Vec<T>], g: &Metric) -> DenseMatrix<T> {
    let n = vs.len();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = metric::inner_unchecked(&vs[i], &vs[j], g);
            out[(j, i)] = v.clone();
            out[(i, j)] = v;
        }
    }
    out
}

//! Kernels of shape operators of the focal variety and the set `N_+` of
//! points whose common kernel contains a spacelike vector.

use serde::Serialize;

use crate::clifford::{CliffordSystem, SigmaElement};
use crate::error::{Error, Result};
use crate::exact::linalg::pivot_columns;
use crate::exact::{gram_matrix, kernel_basis, rank, signature_of_gram, DenseMatrix, Scalar};

use super::level::solve_q_v;

/// Basis of the span of `vectors`, taken from the vectors themselves.
pub fn span_basis<T: Scalar>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    match DenseMatrix::from_columns(vectors) {
        Ok(m) if !vectors.is_empty() => pivot_columns(&m, T::default_tol())
            .into_iter()
            .map(|j| vectors[j].clone())
            .collect(),
        _ => Vec::new(),
    }
}

/// `span(a) ∩ span(b)` for bases `a`, `b`.
pub fn intersect_spans<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a[0].len();
    let (ka, kb) = (a.len(), b.len());
    let mut m = DenseMatrix::zeros(n, ka + kb);
    for i in 0..n {
        for (j, v) in a.iter().enumerate() {
            m[(i, j)] = v[i].clone();
        }
        for (j, v) in b.iter().enumerate() {
            m[(i, ka + j)] = -v[i].clone();
        }
    }
    kernel_basis(&m)
        .into_iter()
        .map(|c| {
            let mut w = vec![T::zero(); n];
            for (cj, v) in c.iter().zip(a) {
                if cj.is_zero() {
                    continue;
                }
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi = wi.clone() + cj.clone() * vi.clone();
                }
            }
            w
        })
        .collect()
}

/// `ker S_v = {Q Q_v x : Q ∈ Σ, ⟨Q_v, Q⟩ = 0}` as `m − 1` vectors.
///
/// The vectors are checked to be linearly independent; a dependent family is
/// reported as an error rather than silently truncated.
pub fn shape_kernel<T: Scalar>(sys: &CliffordSystem<T>, x: &[T], v: &[T]) -> Result<Vec<Vec<T>>> {
    let vv = sys.inner(v, v);
    if vv.near_zero(T::default_tol()) {
        return Err(Error::NullNormal);
    }
    let qv = solve_q_v(sys, x, v)?;
    let eta = sys.eta();
    let row: Vec<T> = qv
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| if eta.sign(i) > 0 { c.clone() } else { -c.clone() })
        .collect();
    let complement = kernel_basis(&DenseMatrix::from_vec(1, sys.m, row)?);
    let basis: Vec<Vec<T>> = complement
        .into_iter()
        .map(|b| SigmaElement::new(sys, b).apply(v))
        .collect();
    let independent = rank(&DenseMatrix::from_columns(&basis)?);
    if independent != sys.m - 1 {
        return Err(Error::IdentityViolated(format!(
            "shape kernel family has rank {independent}, expected {}",
            sys.m - 1
        )));
    }
    Ok(basis)
}

/// Outcome of the `N_+` test at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct NPlusVerdict<T> {
    pub member: bool,
    /// Basis of `∩_i ker S_{P_i x}`.
    pub basis: Vec<Vec<T>>,
    /// Inertia `(neg, zero, pos)` of the metric restricted to that space.
    pub inertia: (usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InertiaJson {
    pub neg: usize,
    pub zero: usize,
    pub pos: usize,
}

impl From<(usize, usize, usize)> for InertiaJson {
    fn from((neg, zero, pos): (usize, usize, usize)) -> Self {
        Self { neg, zero, pos }
    }
}

/// Decides `x ∈ N_+` from the exact inertia of the common kernel
/// `V = ∩_i ker S_{P_i x}`: `x` is a member iff `V` has a positive direction.
///
/// Only the line through `x` matters, so an unnormalised representative
/// is accepted.
pub fn n_plus_membership<T: Scalar>(sys: &CliffordSystem<T>, x: &[T]) -> Result<NPlusVerdict<T>> {
    let tol = T::default_tol();
    let n = sys.inner(x, x);
    if n.near_zero(tol) || n < T::zero() {
        return Err(Error::Precondition("point has no positive multiple on the sphere".into()));
    }
    if super::level::constraint_values(sys, x).iter().any(|c| !c.near_zero(tol)) {
        return Err(Error::Precondition("point is not on the focal variety".into()));
    }
    let mut common: Option<Vec<Vec<T>>> = None;
    for i in 0..sys.m {
        let k = shape_kernel(sys, x, &sys.apply(i, x))?;
        common = Some(match common {
            None => k,
            Some(acc) => intersect_spans(&acc, &k),
        });
        if common.as_ref().is_some_and(Vec::is_empty) {
            break;
        }
    }
    let basis = common.unwrap_or_default();
    let inertia = if basis.is_empty() {
        (0, 0, 0)
    } else {
        signature_of_gram(&gram_matrix(&basis, &sys.metric()))?
    };
    Ok(NPlusVerdict { member: inertia.2 > 0, basis, inertia })
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span<T: Scalar>(basis: &[Vec<T>], v: &[T]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x.near_zero(T::default_tol()));
    }
    let mut cols = basis.to_vec();
    let before = rank(&DenseMatrix::from_columns(&cols).expect("equal lengths"));
    cols.push(v.to_vec());
    rank(&DenseMatrix::from_columns(&cols).expect("equal lengths")) == before
}

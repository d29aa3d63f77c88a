use std::collections::BTreeMap;

use crate::exact::{DenseMatrix, Metric, Scalar, SignedPermMatrix};

/// Sparse column vector keyed by coordinate.
pub type SparseVec<T> = BTreeMap<usize, T>;

/// A linear operator on the ambient space.
///
/// Constructed systems are pure signed permutations; basis changes yield
/// linear combinations of them, kept unexpanded so that products applied to
/// vectors stay cheap.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator<T> {
    Perm(SignedPermMatrix),
    Combination(Vec<(T, SignedPermMatrix)>),
    Dense(DenseMatrix<T>),
}

fn sparse_add<T: Scalar>(acc: &mut SparseVec<T>, i: usize, v: T) {
    if v.is_zero() {
        return;
    }
    let slot = acc.entry(i).or_insert_with(T::zero);
    *slot = slot.clone() + v;
    if slot.is_zero() {
        acc.remove(&i);
    }
}

impl<T: Scalar> Operator<T> {
    pub fn order(&self) -> usize {
        match self {
            Self::Perm(p) => p.order(),
            Self::Combination(terms) => terms.first().map_or(0, |(_, p)| p.order()),
            Self::Dense(d) => d.rows(),
        }
    }

    pub fn as_perm(&self) -> Option<&SignedPermMatrix> {
        match self {
            Self::Perm(p) => Some(p),
            _ => None,
        }
    }

    /// Linear combination of signed permutations, merging repeated terms and
    /// collapsing to a single permutation when possible.
    pub fn combination(terms: Vec<(T, SignedPermMatrix)>) -> Self {
        let mut merged: Vec<(T, SignedPermMatrix)> = Vec::new();
        for (c, p) in terms {
            if c.is_zero() {
                continue;
            }
            let negp = p.neg();
            if let Some(slot) = merged.iter_mut().find(|(_, q)| *q == p) {
                slot.0 = slot.0.clone() + c;
            } else if let Some(slot) = merged.iter_mut().find(|(_, q)| *q == negp) {
                slot.0 = slot.0.clone() - c;
            } else {
                merged.push((c, p));
            }
        }
        merged.retain(|(c, _)| !c.is_zero());
        if merged.len() == 1 {
            let (c, p) = &merged[0];
            if *c == T::one() {
                return Self::Perm(p.clone());
            }
            if *c == -T::one() {
                return Self::Perm(p.neg());
            }
        }
        Self::Combination(merged)
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        match self {
            Self::Perm(p) => p.apply(v),
            Self::Combination(terms) => {
                let mut out = vec![T::zero(); v.len()];
                for (c, p) in terms {
                    for (j, x) in v.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        let i = p.image()[j];
                        let term = c.clone() * x.clone();
                        out[i] = if p.signs()[j] > 0 { out[i].clone() + term } else { out[i].clone() - term };
                    }
                }
                out
            }
            Self::Dense(d) => d.mul_vec(v).expect("operator order matches vector length"),
        }
    }

    pub fn apply_sparse(&self, v: &SparseVec<T>) -> SparseVec<T> {
        let mut out = SparseVec::new();
        match self {
            Self::Perm(p) => {
                for (&j, x) in v {
                    let val = if p.signs()[j] > 0 { x.clone() } else { -x.clone() };
                    out.insert(p.image()[j], val);
                }
            }
            Self::Combination(terms) => {
                for (c, p) in terms {
                    for (&j, x) in v {
                        let term = c.clone() * x.clone();
                        let term = if p.signs()[j] > 0 { term } else { -term };
                        sparse_add(&mut out, p.image()[j], term);
                    }
                }
            }
            Self::Dense(d) => {
                for i in 0..d.rows() {
                    let mut acc = T::zero();
                    for (&j, x) in v {
                        if !d[(i, j)].is_zero() {
                            acc = acc + d[(i, j)].clone() * x.clone();
                        }
                    }
                    sparse_add(&mut out, i, acc);
                }
            }
        }
        out
    }

    /// Column `j` as a sparse vector.
    pub fn column(&self, j: usize) -> SparseVec<T> {
        let mut e = SparseVec::new();
        e.insert(j, T::one());
        self.apply_sparse(&e)
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        match self {
            Self::Perm(p) => p.to_dense(),
            Self::Dense(d) => d.clone(),
            Self::Combination(_) => {
                let n = self.order();
                let mut out = DenseMatrix::zeros(n, n);
                for j in 0..n {
                    for (i, v) in self.column(j) {
                        out[(i, j)] = v;
                    }
                }
                out
            }
        }
    }

    /// `self · other`; stays a signed permutation when both factors are.
    pub fn compose(&self, other: &Self) -> Self {
        if let (Self::Perm(a), Self::Perm(b)) = (self, other) {
            return Self::Perm(a.compose(b));
        }
        let n = self.order();
        let mut out = DenseMatrix::zeros(n, n);
        for j in 0..n {
            for (i, v) in self.apply_sparse(&other.column(j)) {
                out[(i, j)] = v;
            }
        }
        Self::Dense(out)
    }

    pub fn neg(&self) -> Self {
        match self {
            Self::Perm(p) => Self::Perm(p.neg()),
            Self::Combination(t) => {
                Self::Combination(t.iter().map(|(c, p)| (-c.clone(), p.clone())).collect())
            }
            Self::Dense(d) => Self::Dense(d.neg()),
        }
    }

    /// Exact (or default-tolerance) equality as linear maps.
    pub fn same_as(&self, other: &Self) -> bool {
        if let (Self::Perm(a), Self::Perm(b)) = (self, other) {
            return a == b;
        }
        (0..self.order()).all(|j| {
            let a = self.column(j);
            let b = other.column(j);
            let keys: std::collections::BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
            keys.iter().all(|k| {
                let x = a.get(k).cloned().unwrap_or_else(T::zero);
                let y = b.get(k).cloned().unwrap_or_else(T::zero);
                (x - y).near_zero(T::default_tol())
            })
        })
    }

    /// Whether the operator equals `eps · I`.
    pub fn is_scalar(&self, eps: i8) -> bool {
        if let Self::Perm(p) = self {
            return p.is_scalar(eps);
        }
        let e = T::ratio(eps as i64, 1);
        (0..self.order()).all(|j| {
            let c = self.column(j);
            c.iter().all(|(&i, v)| {
                if i == j {
                    (v.clone() - e.clone()).near_zero(T::default_tol())
                } else {
                    v.near_zero(T::default_tol())
                }
            }) && c.contains_key(&j)
        })
    }

    /// `ᵗQ = J Q J`.
    pub fn is_symmetric_wrt(&self, g: &Metric) -> bool {
        if g.dim() != self.order() {
            return false;
        }
        match self {
            Self::Perm(p) => p.is_symmetric_wrt(g),
            Self::Combination(terms) => terms.iter().all(|(_, p)| p.is_symmetric_wrt(g)) || {
                crate::exact::is_symmetric_wrt(&self.to_dense(), g).unwrap_or(false)
            },
            Self::Dense(d) => crate::exact::is_symmetric_wrt(d, g).unwrap_or(false),
        }
    }

    pub fn trace(&self) -> T {
        match self {
            Self::Perm(p) => (0..p.order())
                .filter(|&j| p.image()[j] == j)
                .fold(T::zero(), |acc, j| acc + T::ratio(p.signs()[j] as i64, 1)),
            _ => (0..self.order()).fold(T::zero(), |acc, j| {
                acc + self.column(j).get(&j).cloned().unwrap_or_else(T::zero)
            }),
        }
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Operator<U> {
        match self {
            Self::Perm(p) => Operator::Perm(p.clone()),
            Self::Combination(t) => {
                Operator::Combination(t.iter().map(|(c, p)| (f(c), p.clone())).collect())
            }
            Self::Dense(d) => Operator::Dense(d.map(f)),
        }
    }
}

/// First entry where `AB + BA` differs from `2η I`, as `(row, col, found, expected)`.
pub fn anticommutator_mismatch<T: Scalar>(
    a: &Operator<T>,
    b: &Operator<T>,
    eta: i8,
) -> Option<(usize, usize, T, T)> {
    if let (Operator::Perm(p), Operator::Perm(q)) = (a, b) {
        let ok = if p == q {
            p.compose(p).is_scalar(eta)
        } else {
            p.compose(q) == q.compose(p).neg() && eta == 0
        };
        if ok {
            return None;
        }
    }
    let two_eta = T::ratio(2 * eta as i64, 1);
    for j in 0..a.order() {
        let e = {
            let mut e = SparseVec::new();
            e.insert(j, T::one());
            e
        };
        let mut sum = a.apply_sparse(&b.apply_sparse(&e));
        for (i, v) in b.apply_sparse(&a.apply_sparse(&e)) {
            sparse_add(&mut sum, i, v);
        }
        if !two_eta.is_zero() {
            sparse_add(&mut sum, j, -two_eta.clone());
        }
        if let Some((&i, v)) = sum.iter().find(|(_, v)| !v.near_zero(T::default_tol())) {
            let expected = if i == j { two_eta.clone() } else { T::zero() };
            let found = v.clone() + expected.clone();
            return Some((i, j, found, expected));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;

    fn q(n: i64) -> Rational {
        Rational::ratio(n, 1)
    }

    #[test]
    fn combination_collapses() {
        let p = SignedPermMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap();
        let op = Operator::combination(vec![(q(2), p.clone()), (q(1), p.neg())]);
        assert_eq!(op, Operator::Perm(p.clone()));
        let zero = Operator::combination(vec![(q(1), p.clone()), (q(1), p.neg())]);
        assert_eq!(zero, Operator::Combination(vec![]));
    }

    #[test]
    fn compose_and_apply_agree_with_dense() {
        let p = SignedPermMatrix::from_rows(&[&[0, 1, 0], &[0, 0, -1], &[1, 0, 0]]).unwrap();
        let r = SignedPermMatrix::diagonal(&[1, -1, 1]);
        let a = Operator::combination(vec![(Rational::ratio(3, 5), p.clone()), (Rational::ratio(4, 5), r.clone())]);
        let b = Operator::Perm(p.clone());
        let dense = a.to_dense().mul(&b.to_dense()).unwrap();
        assert_eq!(a.compose(&b).to_dense(), dense);
        let v = vec![q(1), q(-2), q(3)];
        assert_eq!(a.apply(&v), a.to_dense().mul_vec(&v).unwrap());
    }

    #[test]
    fn anticommutator_of_scaled_operator() {
        let p = SignedPermMatrix::diagonal(&[1, -1]);
        let doubled = Operator::combination(vec![(q(2), p.clone())]);
        let hit = anticommutator_mismatch(&doubled, &doubled, 1).unwrap();
        assert_eq!(hit, (0, 0, q(8), q(2)));
        assert!(anticommutator_mismatch::<Rational>(&Operator::Perm(p.clone()), &Operator::Perm(p), 1).is_none());
    }
}

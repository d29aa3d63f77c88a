use super::dense::DenseMatrix;
use super::metric::Metric;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Square matrix with exactly one `±1` in every row and column.
///
/// Column `j` has its nonzero entry `sign[j]` in row `image[j]`; indices
/// are 0-based in memory and 1-based in the JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermMatrix {
    image: Vec<usize>,
    sign: Vec<i8>,
}

impl SignedPermMatrix {
    pub fn new(image: Vec<usize>, sign: Vec<i8>) -> Result<Self> {
        let n = image.len();
        if sign.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: sign.len() });
        }
        let mut seen = vec![false; n];
        for &i in &image {
            if i >= n || seen[i] {
                return Err(Error::Malformed(format!("image is not a permutation of 0..{n}")));
            }
            seen[i] = true;
        }
        if sign.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Malformed("signs must be +1 or -1".into()));
        }
        Ok(Self { image, sign })
    }

    pub fn identity(n: usize) -> Self {
        Self { image: (0..n).collect(), sign: vec![1; n] }
    }

    /// `diag(signs)`.
    pub fn diagonal(signs: &[i8]) -> Self {
        Self { image: (0..signs.len()).collect(), sign: signs.to_vec() }
    }

    /// The metric matrix `J` as a signed permutation.
    pub fn metric(g: &Metric) -> Self {
        Self::diagonal(&g.signs().collect::<Vec<_>>())
    }

    /// Builds from a row table of entries in `{-1, 0, 1}`.
    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let n = rows.len();
        let mut image = vec![usize::MAX; n];
        let mut sign = vec![0i8; n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if image[j] != usize::MAX {
                    return Err(Error::Malformed(format!("column {j} has two nonzero entries")));
                }
                image[j] = i;
                sign[j] = x;
            }
        }
        if image.contains(&usize::MAX) {
            return Err(Error::Malformed("a column has no nonzero entry".into()));
        }
        Self::new(image, sign)
    }

    /// Recognises a dense matrix of signed-permutation shape.
    pub fn from_dense<T: Scalar>(m: &DenseMatrix<T>) -> Option<Self> {
        if !m.is_square() {
            return None;
        }
        let n = m.rows();
        let mut image = Vec::with_capacity(n);
        let mut sign = Vec::with_capacity(n);
        for j in 0..n {
            let mut found = None;
            for i in 0..n {
                let x = &m[(i, j)];
                if x.is_zero() {
                    continue;
                }
                let s = if *x == T::one() {
                    1
                } else if *x == -T::one() {
                    -1
                } else {
                    return None;
                };
                if found.is_some() {
                    return None;
                }
                found = Some((i, s));
            }
            let (i, s) = found?;
            image.push(i);
            sign.push(s);
        }
        Self::new(image, sign).ok()
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn signs(&self) -> &[i8] {
        &self.sign
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        if self.image[j] == i {
            self.sign[j]
        } else {
            0
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.order(), other.order(), "order mismatch in compose");
        let image = other.image.iter().map(|&k| self.image[k]).collect();
        let sign = other
            .image
            .iter()
            .zip(&other.sign)
            .map(|(&k, &s)| s * self.sign[k])
            .collect();
        Self { image, sign }
    }

    pub fn transpose(&self) -> Self {
        let n = self.order();
        let mut image = vec![0; n];
        let mut sign = vec![0; n];
        for j in 0..n {
            image[self.image[j]] = j;
            sign[self.image[j]] = self.sign[j];
        }
        Self { image, sign }
    }

    pub fn neg(&self) -> Self {
        Self { image: self.image.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    pub fn kronecker(&self, other: &Self) -> Self {
        let nb = other.order();
        let n = self.order() * nb;
        let mut image = vec![0; n];
        let mut sign = vec![0; n];
        for ja in 0..self.order() {
            for jb in 0..nb {
                let col = ja * nb + jb;
                image[col] = self.image[ja] * nb + other.image[jb];
                sign[col] = self.sign[ja] * other.sign[jb];
            }
        }
        Self { image, sign }
    }

    /// Matrix-vector product.
    pub fn apply<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.order(), "vector length mismatch");
        let mut out = vec![T::zero(); v.len()];
        for (j, x) in v.iter().enumerate() {
            out[self.image[j]] = if self.sign[j] > 0 { x.clone() } else { -x.clone() };
        }
        out
    }

    pub fn to_dense<T: Scalar>(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.order(), self.order());
        for j in 0..self.order() {
            m[(self.image[j], j)] = T::ratio(self.sign[j] as i64, 1);
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.is_scalar(1)
    }

    /// Whether the matrix equals `eps · I`.
    pub fn is_scalar(&self, eps: i8) -> bool {
        self.image.iter().enumerate().all(|(j, &i)| i == j) && self.sign.iter().all(|&s| s == eps)
    }

    /// `ᵗQ = J Q J`.
    pub fn is_symmetric_wrt(&self, g: &Metric) -> bool {
        if g.dim() != self.order() {
            return false;
        }
        (0..self.order()).all(|j| {
            let i = self.image[j];
            self.image[i] == j && self.sign[i] == g.sign(i) * g.sign(j) * self.sign[j]
        })
    }

    /// `ᵗA J A = J`.
    pub fn is_pseudo_orthogonal(&self, g: &Metric) -> bool {
        g.dim() == self.order() && (0..self.order()).all(|j| g.sign(self.image[j]) == g.sign(j))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_symmetric_wrt(&Metric::euclidean(self.order()))
    }

    pub fn is_skew_symmetric(&self) -> bool {
        (0..self.order()).all(|j| {
            let i = self.image[j];
            i != j && self.image[i] == j && self.sign[i] == -self.sign[j]
        })
    }

    /// Bases of the `+1` and `-1` eigenspaces of an involution.
    ///
    /// Fixed points give coordinate vectors; a 2-cycle `j ↔ k` with
    /// `P e_j = s e_k` gives `e_j + s e_k` and `e_j − s e_k`.
    pub fn involution_eigenbasis<T: Scalar>(&self) -> Result<(Vec<Vec<T>>, Vec<Vec<T>>)> {
        if !self.compose(self).is_identity() {
            return Err(Error::Precondition("matrix is not an involution".into()));
        }
        let n = self.order();
        let (mut plus, mut minus) = (Vec::new(), Vec::new());
        for j in 0..n {
            let k = self.image[j];
            if k == j {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                if self.sign[j] > 0 {
                    plus.push(e);
                } else {
                    minus.push(e);
                }
            } else if j < k {
                let s = T::ratio(self.sign[j] as i64, 1);
                let mut p = vec![T::zero(); n];
                p[j] = T::one();
                p[k] = s.clone();
                let mut q = vec![T::zero(); n];
                q[j] = T::one();
                q[k] = -s;
                plus.push(p);
                minus.push(q);
            }
        }
        Ok((plus, minus))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::Rational;
    use proptest::prelude::*;

    fn arb_signed_perm(n: usize) -> impl Strategy<Value = SignedPermMatrix> {
        (
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], n),
        )
            .prop_map(|(image, sign)| SignedPermMatrix::new(image, sign).unwrap())
    }

    #[test]
    fn rows_round_trip() {
        let a = SignedPermMatrix::from_rows(&[&[0, -1], &[1, 0]]).unwrap();
        assert_eq!(a.entry(0, 1), -1);
        assert_eq!(a.entry(1, 0), 1);
        assert!(a.is_skew_symmetric());
        assert!(SignedPermMatrix::from_rows(&[&[1, 1], &[0, 0]]).is_err());
    }

    #[test]
    fn symmetry_wrt_metric() {
        let d = SignedPermMatrix::diagonal(&[1, -1]);
        assert!(d.is_symmetric_wrt(&Metric::euclidean(2)));
        let swap = SignedPermMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(swap.is_symmetric_wrt(&Metric::euclidean(2)));
        assert!(!swap.is_symmetric_wrt(&Metric::new(1, 1)));
        let twist = SignedPermMatrix::from_rows(&[&[0, -1], &[1, 0]]).unwrap();
        assert!(twist.is_symmetric_wrt(&Metric::new(1, 1)));
    }

    #[test]
    fn involution_eigenvectors() {
        let p = SignedPermMatrix::from_rows(&[&[0, 0, 1], &[0, -1, 0], &[1, 0, 0]]).unwrap();
        let (plus, minus) = p.involution_eigenbasis::<Rational>().unwrap();
        assert_eq!((plus.len(), minus.len()), (1, 2));
        for v in &plus {
            assert_eq!(&p.apply(v), v);
        }
        for v in &minus {
            let pv = p.apply(v);
            assert!(pv.iter().zip(v).all(|(a, b)| *a == -b.clone()));
        }
    }

    proptest! {
        #[test]
        fn compose_agrees_with_dense(a in arb_signed_perm(6), b in arb_signed_perm(6)) {
            let fast = a.compose(&b).to_dense::<Rational>();
            let slow = a.to_dense::<Rational>().mul(&b.to_dense()).unwrap();
            prop_assert_eq!(fast, slow);
        }

        #[test]
        fn transpose_and_kronecker_agree_with_dense(a in arb_signed_perm(3), b in arb_signed_perm(4)) {
            prop_assert_eq!(a.transpose().to_dense::<Rational>(), a.to_dense::<Rational>().transpose());
            prop_assert_eq!(
                a.kronecker(&b).to_dense::<Rational>(),
                a.to_dense::<Rational>().kronecker(&b.to_dense())
            );
        }

        #[test]
        fn kronecker_is_associative(a in arb_signed_perm(2), b in arb_signed_perm(3), c in arb_signed_perm(2)) {
            prop_assert_eq!(a.kronecker(&b).kronecker(&c), a.kronecker(&b.kronecker(&c)));
        }

        #[test]
        fn fast_symmetry_test_agrees_with_dense(a in arb_signed_perm(5), neg in 0usize..=5) {
            let g = Metric::new(neg, 5 - neg);
            let q = a.compose(&a.transpose().compose(&SignedPermMatrix::metric(&g)));
            let d = q.to_dense::<Rational>();
            let j = SignedPermMatrix::metric(&g).to_dense::<Rational>();
            let slow = d.transpose() == j.mul(&d).unwrap().mul(&j).unwrap();
            prop_assert_eq!(q.is_symmetric_wrt(&g), slow);
        }
    }
}

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Diagonal metric `(-E_neg) ⊕ E_pos`: the first `neg` coordinates are timelike.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Metric {
    pub neg: usize,
    pub pos: usize,
}

impl Metric {
    pub fn new(neg: usize, pos: usize) -> Self {
        Self { neg, pos }
    }

    pub fn euclidean(n: usize) -> Self {
        Self { neg: 0, pos: n }
    }

    pub fn dim(&self) -> usize {
        self.neg + self.pos
    }

    /// Diagonal entry `±1` at coordinate `i` (0-based).
    pub fn sign(&self, i: usize) -> i8 {
        if i < self.neg {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> impl Iterator<Item = i8> + '_ {
        (0..self.dim()).map(move |i| self.sign(i))
    }

    /// `J v`.
    pub fn apply<T: Scalar>(&self, v: &[T]) -> Vec<T> {
        v.iter()
            .enumerate()
            .map(|(i, x)| if i < self.neg { -x.clone() } else { x.clone() })
            .collect()
    }

    fn check<T>(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }
}

/// `ᵗu J v`.
pub fn pseudo_inner<T: Scalar>(u: &[T], v: &[T], g: &Metric) -> Result<T> {
    g.check(u)?;
    g.check(v)?;
    Ok(inner_unchecked(u, v, g))
}

/// `ᵗu J v` without length checks; callers guarantee matching lengths.
pub(crate) fn inner_unchecked<T: Scalar>(u: &[T], v: &[T], g: &Metric) -> T {
    let mut neg = T::zero();
    let mut pos = T::zero();
    for (i, (a, b)) in u.iter().zip(v).enumerate() {
        if i < g.neg {
            neg = neg + a.clone() * b.clone();
        } else {
            pos = pos + a.clone() * b.clone();
        }
    }
    pos - neg
}

/// Euclidean dot product.
pub fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    u.iter().zip(v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

pub fn axpy<T: Scalar>(a: &T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = yi.clone() + a.clone() * xi.clone();
    }
}

pub fn scaled<T: Scalar>(a: &T, x: &[T]) -> Vec<T> {
    x.iter().map(|xi| a.clone() * xi.clone()).collect()
}

pub fn add<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.clone() + b.clone()).collect()
}

pub fn sub<T: Scalar>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).map(|(a, b)| a.clone() - b.clone()).collect()
}

pub fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

/// Euclidean norm, for reporting residuals.
pub fn norm_f64<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|x| x.to_f64_lossy().powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::ratio(n, 1)
    }

    #[test]
    fn basis_vectors_in_neutral_metric() {
        let g = Metric::new(8, 8);
        let e1: Vec<Rational> = unit(16, 0);
        let e9: Vec<Rational> = unit(16, 8);
        assert_eq!(pseudo_inner(&e1, &e1, &g).unwrap(), q(-1));
        assert_eq!(pseudo_inner(&e9, &e9, &g).unwrap(), q(1));
    }

    #[test]
    fn unnormalized_null_free_vector_with_squared_scale() {
        let g = Metric::new(8, 8);
        let mut a1: Vec<Rational> = unit(16, 0);
        a1[7] = q(1);
        let raw = pseudo_inner(&a1, &a1, &g).unwrap();
        assert_eq!(raw, q(-2));
        assert_eq!(raw * Rational::ratio(1, 2), q(-1));
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = Metric::new(1, 1);
        let u = vec![q(1), q(2), q(3)];
        assert!(matches!(
            pseudo_inner(&u, &u, &g),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}

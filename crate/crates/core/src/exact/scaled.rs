use super::metric::{inner_unchecked, Metric};
use super::scalar::Scalar;

/// The vector `√scale_sq · coords`, with only `scale_sq` stored.
///
/// Inner products of two scaled vectors with the same squared scale stay in
/// the base field, which is all the exact layer needs from `1/√2`-type
/// normalisations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledVector<T> {
    pub coords: Vec<T>,
    pub scale_sq: T,
}

impl<T: Scalar> ScaledVector<T> {
    pub fn new(coords: Vec<T>, scale_sq: T) -> Self {
        Self { coords, scale_sq }
    }

    pub fn unscaled(coords: Vec<T>) -> Self {
        Self { coords, scale_sq: T::one() }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// `⟨self, self⟩` including the scale.
    pub fn self_inner(&self, g: &Metric) -> T {
        inner_unchecked(&self.coords, &self.coords, g) * self.scale_sq.clone()
    }

    /// Raw coordinates inner product, without the scale.
    pub fn raw_inner(&self, other: &[T], g: &Metric) -> T {
        inner_unchecked(&self.coords, other, g)
    }

    /// Floating-point coordinates with the square root applied.
    pub fn to_f64(&self) -> Vec<f64> {
        let s = self.scale_sq.to_f64_lossy().sqrt();
        self.coords.iter().map(|x| x.to_f64_lossy() * s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::scalar::Rational;

    #[test]
    fn half_scaled_pair() {
        let g = Metric::new(8, 8);
        let mut c = vec![Rational::ratio(0, 1); 16];
        c[0] = Rational::ratio(1, 1);
        c[7] = Rational::ratio(1, 1);
        let a = ScaledVector::new(c, Rational::ratio(1, 2));
        assert_eq!(a.self_inner(&g), Rational::ratio(-1, 1));
        let f = a.to_f64();
        assert!((f[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}

//! The scalar abstraction shared by the exact and the sampling layers.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

use super::dense::DenseMatrix;
use super::linalg;

/// Arbitrary-precision rational; every construction-layer entry lives here.
pub type Rational = BigRational;

/// Field elements the library computes with.
///
/// Exact types ignore every tolerance argument: `near_zero` is a true zero
/// test. Floating types compare against the tolerance in absolute terms.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact and `near_zero` ignores its tolerance.
    const EXACT: bool;

    /// Tolerance used when a caller does not supply one.
    fn default_tol() -> f64;

    fn near_zero(&self, tol: f64) -> bool;

    /// `num / den` as a field element.
    fn ratio(num: i64, den: i64) -> Self;

    /// Best-effort conversion to `f64` (used for reporting and for the
    /// sampling layer).
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// JSON form: `"num/den"` for rationals, a number for floats.
    fn to_json(&self) -> serde_json::Value;

    /// Exact or approximate null space; exact types override this with
    /// fraction-free elimination.
    fn kernel_basis(m: &DenseMatrix<Self>, tol: f64) -> Vec<Vec<Self>> {
        linalg::kernel_by_elimination(m, tol)
    }

    fn rank(m: &DenseMatrix<Self>, tol: f64) -> usize {
        linalg::rank_by_elimination(m, tol)
    }

    fn determinant(m: &DenseMatrix<Self>, tol: f64) -> Self {
        linalg::determinant_by_elimination(m, tol)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn default_tol() -> f64 {
        0.0
    }

    fn near_zero(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn kernel_basis(m: &DenseMatrix<Self>, _tol: f64) -> Vec<Vec<Self>> {
        super::bareiss::kernel_basis(m)
    }

    fn rank(m: &DenseMatrix<Self>, _tol: f64) -> usize {
        super::bareiss::rank(m)
    }

    fn determinant(m: &DenseMatrix<Self>, _tol: f64) -> Self {
        super::bareiss::determinant(m)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty, $tol:expr) => {
        impl Scalar for $f {
            const EXACT: bool = false;

            fn default_tol() -> f64 {
                $tol
            }

            fn near_zero(&self, tol: f64) -> bool {
                (*self as f64).abs() <= tol
            }

            fn ratio(num: i64, den: i64) -> Self {
                (num as f64 / den as f64) as $f
            }

            fn to_json(&self) -> serde_json::Value {
                serde_json::json!(*self)
            }
        }
    };
}

impl_float_scalar!(f64, 1e-10);
impl_float_scalar!(f32, 1e-5);

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str_radix(n.trim(), 10).ok()?;
            let d = BigInt::from_str_radix(d.trim(), 10).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => BigInt::from_str_radix(text, 10).ok().map(BigRational::from_integer),
    }
}

/// Formats as `"num/den"`, always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Whether a non-negative rational is the square of a rational.
pub fn is_rational_square(q: &Rational) -> bool {
    if q.is_negative() {
        return false;
    }
    if q.is_zero() {
        return true;
    }
    is_int_square(q.numer()) && is_int_square(q.denom())
}

/// Exact square root of a rational square, if it is one.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if !is_rational_square(q) {
        return None;
    }
    Some(BigRational::new(q.numer().sqrt(), q.denom().sqrt()))
}

fn is_int_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(values: &[Rational]) -> BigInt {
    values
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        let q = Rational::ratio(-6, 4);
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(parse_rational("-3/2"), Some(q));
        assert_eq!(parse_rational("7"), Some(Rational::ratio(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn squares() {
        assert!(is_rational_square(&Rational::ratio(9, 4)));
        assert!(!is_rational_square(&Rational::ratio(1, 2)));
        assert!(!is_rational_square(&Rational::ratio(-1, 1)));
        assert_eq!(rational_sqrt(&Rational::ratio(4, 9)), Some(Rational::ratio(2, 3)));
    }

    #[test]
    fn float_tolerance() {
        assert!(1e-12f64.near_zero(1e-10));
        assert!(!1e-8f64.near_zero(1e-10));
        assert!(!Rational::ratio(1, 1_000_000_000).near_zero(1.0));
    }
}

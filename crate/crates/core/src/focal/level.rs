//! The quartic `F`, its restriction `f` to the pseudo-sphere, geodesics, and
//! the normal-exponential map from the focal variety onto the level sets.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::clifford::{CliffordSystem, SigmaElement};
use crate::error::{Error, Result};
use crate::exact::metric::inner_unchecked;
use crate::exact::{Metric, Scalar};

/// Default tolerance for membership tests in floating point.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// `⟨P_j x, x⟩` for each `j`.
pub fn constraint_values<T: Scalar>(sys: &CliffordSystem<T>, x: &[T]) -> Vec<T> {
    let g = sys.metric();
    sys.operators.iter().map(|p| inner_unchecked(&p.apply(x), x, &g)).collect()
}

/// `H(x) = Σ_j η_jj ⟨P_j x, x⟩²`.
pub fn eval_h<T: Scalar>(sys: &CliffordSystem<T>, x: &[T]) -> T {
    let eta = sys.eta();
    constraint_values(sys, x)
        .into_iter()
        .enumerate()
        .fold(T::zero(), |acc, (j, c)| {
            let sq = c.clone() * c;
            if eta.sign(j) > 0 {
                acc + sq
            } else {
                acc - sq
            }
        })
}

/// `F(x) = ⟨x, x⟩² − 2H(x)`.
pub fn eval_big_f<T: Scalar>(sys: &CliffordSystem<T>, x: &[T]) -> T {
    let n = sys.inner(x, x);
    let two = T::ratio(2, 1);
    n.clone() * n - two * eval_h(sys, x)
}

fn off_sphere<T: Scalar>(sys: &CliffordSystem<T>, x: &[T], tol: f64) -> Option<T> {
    let n = sys.inner(x, x);
    if (n.clone() - T::one()).near_zero(tol) {
        None
    } else {
        Some(n)
    }
}

/// `f = F` restricted to `S^{2l-1}_s`.
pub fn eval_f<T: Scalar>(sys: &CliffordSystem<T>, x: &[T]) -> Result<T> {
    if let Some(n) = off_sphere(sys, x, MEMBERSHIP_TOL) {
        return Err(Error::Precondition(format!(
            "point is off the unit pseudo-sphere (⟨x,x⟩ = {})",
            n.to_f64_lossy()
        )));
    }
    Ok(eval_big_f(sys, x))
}

/// Whether `⟨x,x⟩ = 1` and `⟨P_j x, x⟩ = 0` for every `j`.
pub fn m_plus_membership<T: Scalar>(sys: &CliffordSystem<T>, x: &[T]) -> bool {
    m_plus_membership_tol(sys, x, MEMBERSHIP_TOL)
}

pub fn m_plus_membership_tol<T: Scalar>(sys: &CliffordSystem<T>, x: &[T], tol: f64) -> bool {
    x.len() == sys.dim()
        && off_sphere(sys, x, tol).is_none()
        && constraint_values(sys, x).iter().all(|c| c.near_zero(tol))
}

/// Finite-difference gradient of `f` on the pseudo-sphere: the pseudo-gradient
/// `J ∂F` from central differences, projected onto `T_x S`.
pub fn grad_f_numeric(sys: &CliffordSystem<f64>, x: &[f64]) -> Vec<f64> {
    const STEP: f64 = 1e-6;
    let n = x.len();
    let mut partial = vec![0.0; n];
    let mut probe = x.to_vec();
    for i in 0..n {
        probe[i] = x[i] + STEP;
        let up = eval_big_f(sys, &probe);
        probe[i] = x[i] - STEP;
        let down = eval_big_f(sys, &probe);
        probe[i] = x[i];
        partial[i] = (up - down) / (2.0 * STEP);
    }
    let g = sys.metric();
    let grad = g.apply(&partial);
    let along = inner_unchecked(&grad, x, &g) / inner_unchecked(x, x, &g);
    grad.iter().zip(x).map(|(a, b)| a - along * b).collect()
}

/// `γ_{x,v}(t)` in `N(κ)`, with `τ = κ⟨v,v⟩` choosing the branch.
pub fn geodesic(g: &Metric, x: &[f64], v: &[f64], t: f64, kappa: f64) -> Vec<f64> {
    let tau = kappa * inner_unchecked(v, v, g);
    let (a, b) = if tau > 0.0 {
        let w = tau.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else if tau < 0.0 {
        let w = (-tau).sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        (1.0, t)
    };
    x.iter().zip(v).map(|(xi, vi)| a * xi + b * vi).collect()
}

/// `γ′_{x,v}(t)`.
pub fn geodesic_velocity(g: &Metric, x: &[f64], v: &[f64], t: f64, kappa: f64) -> Vec<f64> {
    let tau = kappa * inner_unchecked(v, v, g);
    let (a, b) = if tau > 0.0 {
        let w = tau.sqrt();
        (-w * (w * t).sin(), (w * t).cos())
    } else if tau < 0.0 {
        let w = (-tau).sqrt();
        (w * (w * t).sinh(), (w * t).cosh())
    } else {
        (0.0, 1.0)
    };
    x.iter().zip(v).map(|(xi, vi)| a * xi + b * vi).collect()
}

/// `W_RN(f) ∩ (−1, ∞)`, which depends only on where `r` sits in `0..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularRange {
    /// `(−1, 1)`, for `r = 0`.
    Inner,
    /// `(−1, ∞) \ {1}`, for `0 < r < m`.
    Punctured,
    /// `(1, ∞)`, for `r = m`.
    Outer,
}

impl RegularRange {
    pub fn contains(self, c: f64) -> bool {
        match self {
            Self::Inner => c > -1.0 && c < 1.0,
            Self::Punctured => c > -1.0 && c != 1.0 && c.is_finite(),
            Self::Outer => c > 1.0 && c.is_finite(),
        }
    }
}

impl fmt::Display for RegularRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Inner => "(-1, 1)",
            Self::Punctured => "(-1, inf) \\ {1}",
            Self::Outer => "(1, inf)",
        })
    }
}

impl Serialize for RegularRange {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn w_rn_interval<T>(sys: &CliffordSystem<T>) -> RegularRange {
    range_for(sys.m, sys.r)
}

pub fn range_for(m: usize, r: usize) -> RegularRange {
    if r == 0 {
        RegularRange::Inner
    } else if r == m {
        RegularRange::Outer
    } else {
        RegularRange::Punctured
    }
}

/// Type `δ` of `M_c`: `1` on `(−1, 1)`, `−1` beyond.
pub fn level_type(c: f64) -> i8 {
    if c.abs() < 1.0 {
        1
    } else {
        -1
    }
}

/// `t_c` with `c = cos 4t`, `t ∈ (0, π/4)` (`δ = 1`) or `c = cosh 4t`,
/// `t > 0` (`δ = −1`).
pub fn t_c(c: f64) -> f64 {
    if level_type(c) > 0 {
        c.acos() / 4.0
    } else {
        c.acosh() / 4.0
    }
}

pub(crate) fn check_level<T>(sys: &CliffordSystem<T>, c: f64) -> Result<i8> {
    let range = w_rn_interval(sys);
    if !range.contains(c) {
        return Err(Error::OutsideRegularRange { c, interval: range.to_string() });
    }
    Ok(level_type(c))
}

/// The unique `Q_v ∈ Σ` with `Q_v x = v`, as coefficients in `{P_i}`:
/// `Q_v = Σ_i η_ii ⟨v, P_i x⟩ P_i / ⟨x, x⟩`.
///
/// Dividing by `⟨x, x⟩` lets exact callers pass an unnormalised
/// representative of the base point.
pub fn solve_q_v<'a, T: Scalar>(sys: &'a CliffordSystem<T>, x: &[T], v: &[T]) -> Result<SigmaElement<'a, T>> {
    if x.len() != sys.dim() || v.len() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), found: v.len() });
    }
    let n = sys.inner(x, x);
    if n.near_zero(T::default_tol()) {
        return Err(Error::Precondition("base point is null".into()));
    }
    let eta = sys.eta();
    let coeffs: Vec<T> = (0..sys.m)
        .map(|i| {
            let c = sys.inner(v, &sys.apply(i, x)) / n.clone();
            if eta.sign(i) > 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    let q = SigmaElement::new(sys, coeffs);
    let back = q.apply(x);
    let residual = back
        .iter()
        .zip(v)
        .map(|(a, b)| (a.clone() - b.clone()).to_f64_lossy().abs())
        .fold(0.0, f64::max);
    let scale = v.iter().map(|a| a.to_f64_lossy().abs()).fold(1.0, f64::max);
    let exact_mismatch = T::EXACT && back.iter().zip(v).any(|(a, b)| a != b);
    if exact_mismatch || residual > 1e-9 * scale {
        return Err(Error::NotNormal { residual });
    }
    Ok(q)
}

/// `φ_{t_c}(x, v) = γ_{x,v}(t_c)`.
pub fn focal_map_phi(sys: &CliffordSystem<f64>, x: &[f64], v: &[f64], c: f64) -> Result<Vec<f64>> {
    let delta = check_level(sys, c)?;
    check_normal_datum(sys, x, v, delta)?;
    Ok(geodesic(&sys.metric(), x, v, t_c(c), 1.0))
}

/// `γ′_{x,v}(t_c)`, the velocity at the image point.
pub fn focal_map_velocity(sys: &CliffordSystem<f64>, x: &[f64], v: &[f64], c: f64) -> Result<Vec<f64>> {
    let delta = check_level(sys, c)?;
    check_normal_datum(sys, x, v, delta)?;
    Ok(geodesic_velocity(&sys.metric(), x, v, t_c(c), 1.0))
}

fn check_normal_datum(sys: &CliffordSystem<f64>, x: &[f64], v: &[f64], delta: i8) -> Result<()> {
    if !m_plus_membership_tol(sys, x, 1e-9) {
        return Err(Error::Precondition("base point is not on the focal variety".into()));
    }
    let vv = sys.inner(v, v);
    if (vv - delta as f64).abs() > 1e-9 {
        return Err(Error::Precondition(format!("normal has ⟨v,v⟩ = {vv}, expected {delta}")));
    }
    solve_q_v(sys, x, v)?;
    Ok(())
}

/// Unit normal `ξ_x` of `M_c` at `x`:
/// `(δ(1−c²))^{-1/2} ((1−c)x − 2 Σ_j η_jj ⟨P_j x, x⟩ P_j x)`.
pub fn unit_normal_xi(sys: &CliffordSystem<f64>, x: &[f64], c: f64) -> Result<Vec<f64>> {
    let delta = check_level(sys, c)? as f64;
    let fx = eval_f(sys, x)?;
    if (fx - c).abs() > 1e-7 * c.abs().max(1.0) {
        return Err(Error::Precondition(format!("f(x) = {fx} is not the level {c}")));
    }
    let denom = (delta * (1.0 - c * c)).sqrt();
    let eta = sys.eta();
    let mut out: Vec<f64> = x.iter().map(|xi| (1.0 - c) * xi).collect();
    for (j, cj) in constraint_values(sys, x).into_iter().enumerate() {
        let w = -2.0 * eta.sign(j) as f64 * cj;
        for (o, p) in out.iter_mut().zip(sys.apply(j, x)) {
            *o += w * p;
        }
    }
    Ok(out.into_iter().map(|o| o / denom).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_family, lift_to_clifford_system};
    use crate::exact::Rational;
    use proptest::prelude::*;

    fn system(m: usize, r: usize) -> CliffordSystem<Rational> {
        let (fam, _) = construct_family(m, r).unwrap();
        lift_to_clifford_system(&fam, 1).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    #[test]
    fn zero_and_basis_values() {
        let sys = system(4, 0);
        let zero = vec![q(0, 1); 16];
        assert_eq!(eval_h(&sys, &zero), q(0, 1));
        assert_eq!(eval_big_f(&sys, &zero), q(0, 1));
        assert!(!m_plus_membership(&sys, &zero));
    }

    #[test]
    fn eval_f_rejects_off_sphere_points() {
        let sys = system(4, 0);
        let mut x = vec![q(0, 1); 16];
        x[9] = q(2, 1);
        assert!(matches!(eval_f(&sys, &x), Err(Error::Precondition(_))));
    }

    #[test]
    fn geodesic_branches() {
        let g = Metric::new(1, 2);
        let x = [0.0, 0.0, 1.0];
        let v = [0.0, 1.0, 0.0];
        let q = geodesic(&g, &x, &v, std::f64::consts::FRAC_PI_2, 1.0);
        assert!(q.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-15));
        assert_eq!(geodesic(&g, &x, &v, 0.0, 1.0), x.to_vec());
        assert_eq!(geodesic(&g, &x, &v, 0.5, 0.0), vec![0.0, 0.5, 1.0]);
        let w = [1.0, 0.0, 0.0];
        let h = geodesic(&g, &x, &w, 1.0, 1.0);
        assert!((h[2] - 1f64.cosh()).abs() < 1e-15 && (h[0] - 1f64.sinh()).abs() < 1e-15);
    }

    #[test]
    fn velocity_at_zero_is_v() {
        let g = Metric::new(1, 2);
        for kappa in [1.0, 0.0, -1.0] {
            for v in [[0.3, 0.0, 0.0], [0.0, 0.4, 0.0]] {
                assert_eq!(geodesic_velocity(&g, &[0.0, 0.0, 1.0], &v, 0.0, kappa), v.to_vec());
            }
        }
    }

    #[test]
    fn regular_ranges() {
        assert_eq!(range_for(4, 0), RegularRange::Inner);
        assert_eq!(range_for(4, 4), RegularRange::Outer);
        assert_eq!(range_for(8, 2), RegularRange::Punctured);
        assert!(!RegularRange::Punctured.contains(1.0));
        assert!(RegularRange::Punctured.contains(3.0));
        assert!(!RegularRange::Inner.contains(2.0));
        assert_eq!(RegularRange::Outer.to_string(), "(1, inf)");
    }

    #[test]
    fn t_c_inverts_level() {
        assert!((t_c(0.0) - std::f64::consts::FRAC_PI_8).abs() < 1e-15);
        assert!((t_c(4f64.cosh()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn q_v_of_basis_normal_is_basis_operator() {
        let sys = system(4, 0);
        let mut x = vec![q(0, 1); 16];
        x[8] = q(1, 2);
        x[15] = q(1, 2);
        x[9] = q(1, 2);
        x[14] = q(1, 2);
        assert!(m_plus_membership(&sys, &x));
        let v = sys.apply(0, &x);
        let qv = solve_q_v(&sys, &x, &v).unwrap();
        assert_eq!(qv.coeffs, vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        assert!(matches!(solve_q_v(&sys, &x, &x), Err(Error::NotNormal { .. })));
    }

    proptest! {
        #[test]
        fn quartic_is_homogeneous(raw in proptest::collection::vec(-4i64..=4, 8), num in -3i64..=3, den in 1i64..=3) {
            let sys = system(4, 2);
            let x: Vec<Rational> = raw.iter().map(|&v| q(v, 1)).collect();
            let lambda = q(num, den);
            let scaled: Vec<Rational> = x.iter().map(|v| v * &lambda).collect();
            let l4 = lambda.clone() * lambda.clone() * lambda.clone() * lambda;
            prop_assert_eq!(eval_big_f(&sys, &scaled), eval_big_f(&sys, &x) * l4);
        }
    }
}

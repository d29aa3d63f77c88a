//! The strata `M_{+,1}`, `M_{+,2}`, `M_{+,3}` of the focal variety, its
//! connected components, and explicit paths between the eigenspaces of `P`.

use std::fmt;

use num_traits::One;
use serde::{Serialize, Serializer};

use crate::clifford::{orthogonalize, CliffordSystem, Operator};
use crate::error::{Error, Result};
use crate::exact::metric::inner_unchecked;
use crate::exact::{Rational, Scalar, ScaledVector};

use super::eigen::{eigen_component, CaseLabel, EigenSplit};
use super::level::{constraint_values, m_plus_membership_tol, MEMBERSHIP_TOL};

/// Which stratum a point of `M_+` lies in, by `⟨z_+, z_+⟩ ∈ [1,∞)`,
/// `(−∞,0]` or `(0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratumLabel {
    One,
    Two,
    Three,
}

impl StratumLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::One => "M+,1",
            Self::Two => "M+,2",
            Self::Three => "M+,3",
        }
    }

    fn from_norm<T: Scalar>(n: &T, tol: f64) -> Self {
        let one = T::one();
        if n >= &one || (n.clone() - one).near_zero(tol) {
            Self::One
        } else if n <= &T::zero() || n.near_zero(tol) {
            Self::Two
        } else {
            Self::Three
        }
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for StratumLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A connected component of `M_+`: one of the two strata in the disconnected
/// cases, or all of `M_+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Stratum1,
    Stratum2,
    Whole,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Stratum1 => "M+,1",
            Self::Stratum2 => "M+,2",
            Self::Whole => "M+",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Component {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// The connected components for a case.
pub fn components_of(case: CaseLabel) -> Vec<Component> {
    if case.is_disconnected() {
        vec![Component::Stratum1, Component::Stratum2]
    } else {
        vec![Component::Whole]
    }
}

/// Strata that are non-empty in a case.
pub fn nonempty_strata(case: CaseLabel) -> Vec<StratumLabel> {
    match case {
        CaseLabel::A | CaseLabel::B => vec![StratumLabel::One, StratumLabel::Two],
        CaseLabel::C1 => vec![StratumLabel::One],
        CaseLabel::C2 => vec![StratumLabel::Two],
        _ => vec![StratumLabel::One, StratumLabel::Two, StratumLabel::Three],
    }
}

/// The sign `ε` with `E_ε(P) ∩ S ⊂ component`.
pub fn home_side<T: Scalar>(case: CaseLabel, split: &EigenSplit<T>, component: Component) -> Result<i8> {
    let absent = || Err(Error::Precondition(format!("case {case} has no component {component}")));
    match (component, case.is_disconnected()) {
        (Component::Stratum1, true) => Ok(1),
        (Component::Stratum2, true) => Ok(-1),
        (Component::Whole, false) => Ok(match case {
            CaseLabel::C1 => 1,
            CaseLabel::C2 => -1,
            _ if split.meets_sphere(1) => 1,
            _ => -1,
        }),
        _ => absent(),
    }
}

/// `⟨z_+, z_+⟩` for `z_+ = (I + P)z/2`.
pub fn plus_norm<T: Scalar>(sys: &CliffordSystem<T>, p: &Operator<T>, z: &[T]) -> T {
    let zp = eigen_component(p, z, 1);
    sys.inner(&zp, &zp)
}

/// Stratum of `z ∈ M_+`. Floating input uses the membership tolerance at
/// the stratum boundaries.
pub fn stratum_of<T: Scalar>(sys: &CliffordSystem<T>, z: &[T]) -> Result<StratumLabel> {
    if !m_plus_membership_tol(sys, z, MEMBERSHIP_TOL) {
        return Err(Error::Precondition("point is not on the focal variety".into()));
    }
    let p = sys.full_product();
    Ok(StratumLabel::from_norm(&plus_norm(sys, &p, z), MEMBERSHIP_TOL))
}

/// Whether `√scale_sq · coords` lies on `M_+`, exactly.
pub fn scaled_in_m_plus(sys: &CliffordSystem<Rational>, z: &ScaledVector<Rational>) -> bool {
    z.len() == sys.dim()
        && z.self_inner(&sys.metric()) == Rational::one()
        && constraint_values(sys, &z.coords).iter().all(num_traits::Zero::is_zero)
}

/// Exact stratum of a scaled point.
pub fn stratum_of_scaled(sys: &CliffordSystem<Rational>, z: &ScaledVector<Rational>) -> Result<StratumLabel> {
    if !scaled_in_m_plus(sys, z) {
        return Err(Error::Precondition("point is not on the focal variety".into()));
    }
    let p = sys.full_product();
    let n = plus_norm(sys, &p, &z.coords) * z.scale_sq.clone();
    Ok(StratumLabel::from_norm(&n, 0.0))
}

/// First vector of a pseudo-orthogonal basis of `span(basis)` with positive
/// square, and that square.
pub fn positive_direction<T: Scalar>(sys: &CliffordSystem<T>, basis: &[Vec<T>]) -> Option<(Vec<T>, T)> {
    if basis.is_empty() {
        return None;
    }
    orthogonalize(basis, &sys.metric())
        .ok()?
        .into_iter()
        .find(|(_, n)| *n > T::zero() && !n.near_zero(T::default_tol()))
}

/// A point of `E_ε(P) ∩ S` as a scaled exact vector.
pub fn eigenspace_point(
    sys: &CliffordSystem<Rational>,
    split: &EigenSplit<Rational>,
    eps: i8,
) -> Option<ScaledVector<Rational>> {
    let (u, n) = positive_direction(sys, split.side(eps))?;
    Some(ScaledVector::new(u, Rational::one() / n))
}

/// Which family of curves joins the two ends of a path witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    /// `cos t · x + sin t · y` with `x ∈ E_+`, `y ∈ E_-`, both spacelike.
    Circular,
    /// `cosh t · x + sinh t · y`, `x` spacelike, `y` timelike.
    Hyperbolic,
}

/// A sampled curve in `M_+` through a given point.
#[derive(Debug, Clone, Serialize)]
pub struct PathWitness {
    pub kind: PathKind,
    pub start_stratum: StratumLabel,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Parameter at which the curve passes through the input point.
    pub t_z: f64,
    pub t_end: f64,
    pub samples: Vec<Vec<f64>>,
    pub max_membership_residual: f64,
    /// `max_j |⟨P_j x, y⟩|`.
    pub orthogonality_residual: f64,
    pub through_point_residual: f64,
}

fn unit_part(v: &[f64], n: f64) -> Vec<f64> {
    let s = n.abs().sqrt();
    v.iter().map(|c| c / s).collect()
}

fn membership_residual(sys: &CliffordSystem<f64>, x: &[f64]) -> f64 {
    let n = (sys.inner(x, x) - 1.0).abs();
    constraint_values(sys, x).iter().fold(n, |acc, c| acc.max(c.abs()))
}

/// Decomposes `z = z_+ + z_-` and returns the curve through `z` joining its
/// normalised eigen-parts: on `[0, π/2]` for `z ∈ M_{+,3}`, and the
/// hyperbolic curve from the spacelike part to `z` otherwise (needs the
/// other part to be non-zero).
pub fn path_witness(sys: &CliffordSystem<f64>, z: &[f64], samples: usize) -> Result<PathWitness> {
    let start_stratum = stratum_of(sys, z)?;
    let p = sys.full_product();
    let zp = eigen_component(&p, z, 1);
    let zm = eigen_component(&p, z, -1);
    let a = sys.inner(&zp, &zp);
    let b = sys.inner(&zm, &zm);
    let (kind, x, y, t_z, t_end) = match start_stratum {
        StratumLabel::Three => {
            let t_z = a.sqrt().acos();
            (PathKind::Circular, unit_part(&zp, a), unit_part(&zm, b), t_z, std::f64::consts::FRAC_PI_2)
        }
        StratumLabel::One | StratumLabel::Two => {
            let (pos, neg, n) = if start_stratum == StratumLabel::One { (&zp, &zm, a) } else { (&zm, &zp, b) };
            let m = if start_stratum == StratumLabel::One { b } else { a };
            if m.abs() <= MEMBERSHIP_TOL {
                return Err(Error::Precondition("point already lies in an eigenspace of P".into()));
            }
            let t_z = n.sqrt().acosh();
            (PathKind::Hyperbolic, unit_part(pos, n), unit_part(neg, m), t_z, t_z)
        }
    };
    let count = samples.max(2);
    let curve = |t: f64| -> Vec<f64> {
        let (c, s) = match kind {
            PathKind::Circular => (t.cos(), t.sin()),
            PathKind::Hyperbolic => (t.cosh(), t.sinh()),
        };
        x.iter().zip(&y).map(|(xi, yi)| c * xi + s * yi).collect()
    };
    let pts: Vec<Vec<f64>> = (0..count).map(|k| curve(t_end * k as f64 / (count - 1) as f64)).collect();
    let max_membership_residual = pts.iter().map(|q| membership_residual(sys, q)).fold(0.0, f64::max);
    let g = sys.metric();
    let orthogonality_residual = sys
        .operators
        .iter()
        .map(|op| inner_unchecked(&op.apply(&x), &y, &g).abs())
        .fold(0.0, f64::max);
    let through_point_residual = curve(t_z).iter().zip(z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(PathWitness {
        kind,
        start_stratum,
        x,
        y,
        t_z,
        t_end,
        samples: pts,
        max_membership_residual,
        orthogonality_residual,
        through_point_residual,
    })
}

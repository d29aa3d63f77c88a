//! Exact witnesses: a point of `N_+` in each component, and a point of each
//! component that lies in neither eigenspace of `P` and hence not in `N_+`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::clifford::{orthogonalize, CliffordSystem, Operator};
use crate::error::{Error, Result};
use crate::exact::metric::{inner_unchecked, unit};
use crate::exact::scalar::rational_sqrt;
use crate::exact::{kernel_basis, parse_rational, DenseMatrix, Rational, Scalar, ScaledVector};

use super::eigen::{check_parity, eigen_component, eigensplit, in_eigenspace, CaseLabel, EigenSplit, SignatureData};
use super::shape::{in_span, n_plus_membership, span_basis, NPlusVerdict};
use super::strata::{home_side, positive_direction, scaled_in_m_plus, stratum_of_scaled, Component, StratumLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    NPlusMember,
    InhomogeneityPoint,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NPlusMember => "n_plus_member",
            Self::InhomogeneityPoint => "inhomogeneity_point",
        }
    }
}

/// Data stored next to the point.
#[derive(Debug, Clone, PartialEq)]
pub enum Auxiliary {
    /// A spacelike vector of the common shape kernel, with the same scale as
    /// the point.
    Kernel { v: Vec<Rational>, sign_pattern: Vec<i8>, moved: bool },
    /// `point = x + y` with `x ∈ E_+(P)`, `y ∈ E_-(P)`.
    Decomposition { x: ScaledVector<Rational>, y: ScaledVector<Rational> },
}

/// A replayable certificate attached to one component.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessRecord {
    pub kind: WitnessKind,
    pub component: Component,
    pub point: ScaledVector<Rational>,
    pub aux: Auxiliary,
    pub verdict: NPlusVerdict<Rational>,
    pub stratum: StratumLabel,
    pub checks: BTreeMap<&'static str, bool>,
}

impl WitnessRecord {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    /// First failed check, by name.
    pub fn first_failure(&self) -> Option<&'static str> {
        self.checks.iter().find(|(_, &ok)| !ok).map(|(k, _)| *k)
    }

    /// Recomputes the `N_+` verdict from the stored point.
    pub fn replay(&self, sys: &CliffordSystem<Rational>) -> Result<bool> {
        let again = n_plus_membership(sys, &self.point.coords)?;
        Ok(again.member == self.verdict.member && again.inertia == self.verdict.inertia)
    }

    pub fn to_json(&self) -> Value {
        let aux = match &self.aux {
            Auxiliary::Kernel { v, sign_pattern, moved } => json!({
                "v": vec_json(v),
                "sign_pattern": sign_pattern,
                "moved_by_last_generator": moved,
            }),
            Auxiliary::Decomposition { x, y } => json!({ "x": scaled_json(x), "y": scaled_json(y) }),
        };
        let (neg, zero, pos) = self.verdict.inertia;
        let aux_key = match self.kind {
            WitnessKind::NPlusMember => "kernel_vector",
            WitnessKind::InhomogeneityPoint => "decomposition",
        };
        json!({
            "kind": self.kind.as_str(),
            "component": self.component,
            "point": scaled_json(&self.point),
            "stratum": self.stratum,
            aux_key: aux,
            "verdict": {
                "member": self.verdict.member,
                "kernel_basis": self.verdict.basis.iter().map(|b| vec_json(b)).collect::<Vec<_>>(),
                "inertia": { "neg": neg, "zero": zero, "pos": pos },
            },
            "checks": self.checks,
            "passed": self.passed(),
        })
    }
}

pub(crate) fn vec_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

pub(crate) fn scaled_json(v: &ScaledVector<Rational>) -> Value {
    json!({ "coords": vec_json(&v.coords), "scale_sq": v.scale_sq.to_json() })
}

fn parse_vec(v: &Value) -> Option<Vec<Rational>> {
    v.as_array()?.iter().map(|x| parse_rational(x.as_str()?)).collect()
}

/// Replays a stored record: the point must still lie on `M_+` and its `N_+`
/// verdict and inertia must come out as stored.
pub fn replay_json(sys: &CliffordSystem<Rational>, record: &Value) -> Result<bool> {
    let bad = || Error::Malformed("witness record lacks point or verdict".into());
    let point = &record["point"];
    let coords = parse_vec(&point["coords"]).ok_or_else(bad)?;
    let scale = point["scale_sq"].as_str().and_then(parse_rational).ok_or_else(bad)?;
    let member = record["verdict"]["member"].as_bool().ok_or_else(bad)?;
    let inertia = &record["verdict"]["inertia"];
    let get = |k: &str| inertia[k].as_u64().map(|x| x as usize).ok_or_else(bad);
    let stored = (get("neg")?, get("zero")?, get("pos")?);
    let z = ScaledVector::new(coords, scale);
    if !scaled_in_m_plus(sys, &z) {
        return Ok(false);
    }
    let again = n_plus_membership(sys, &z.coords)?;
    Ok(again.member == member && again.inertia == stored)
}

fn scaled_norm(sys: &CliffordSystem<Rational>, v: &[Rational], scale: &Rational) -> Rational {
    sys.inner(v, v) * scale
}

fn analysed(sys: &CliffordSystem<Rational>) -> Result<(EigenSplit<Rational>, CaseLabel)> {
    check_parity(sys)?;
    let split = eigensplit(sys)?;
    let case = SignatureData::of(sys, &split).classify()?;
    Ok((split, case))
}

/// `R_i = P_{2i−1} P_{2i} P_{2i+1} P_{2i+2}` for `i = 1, …, (m−2)/2`.
pub fn commuting_involutions(sys: &CliffordSystem<Rational>) -> Vec<Operator<Rational>> {
    (0..(sys.m - 2) / 2).map(|i| sys.product(&[2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3])).collect()
}

type JointHit = (Vec<i8>, Vec<Rational>, Rational);

fn joint_search(
    sys: &CliffordSystem<Rational>,
    rs: &[Operator<Rational>],
    basis: Vec<Vec<Rational>>,
    pattern: &mut Vec<i8>,
) -> Option<JointHit> {
    let depth = pattern.len();
    if depth == rs.len() {
        return positive_direction(sys, &basis).map(|(u, n)| (pattern.clone(), u, n));
    }
    for eps in [1i8, -1] {
        let projected: Vec<Vec<Rational>> = basis.iter().map(|b| eigen_component(&rs[depth], b, eps)).collect();
        let sub = span_basis(&projected);
        if sub.is_empty() {
            continue;
        }
        pattern.push(eps);
        if let Some(hit) = joint_search(sys, rs, sub, pattern) {
            return Some(hit);
        }
        pattern.pop();
    }
    None
}

/// A spacelike vector in the first joint eigenspace of the `R_i` (sign
/// patterns in lexicographic order, `+` first) that meets the sphere.
pub fn joint_eigen_point(sys: &CliffordSystem<Rational>) -> Result<JointHit> {
    check_parity(sys)?;
    let rs = commuting_involutions(sys);
    for (i, r) in rs.iter().enumerate() {
        if !r.compose(r).is_scalar(1) {
            return Err(Error::IdentityViolated(format!("R_{} is not an involution", i + 1)));
        }
    }
    let n = sys.dim();
    let start: Vec<Vec<Rational>> = (0..n).map(|i| unit(n, i)).collect();
    let hit = joint_search(sys, &rs, start, &mut Vec::new())
        .ok_or_else(|| Error::IdentityViolated("no joint eigenspace of the R_i meets the sphere".into()))?;
    for (r, &eps) in rs.iter().zip(&hit.0) {
        if !in_eigenspace(r, &hit.1, eps, 0.0) {
            return Err(Error::IdentityViolated("joint eigenvector check failed".into()));
        }
    }
    Ok(hit)
}

fn eigen_sign(p: &Operator<Rational>, x: &[Rational]) -> Option<i8> {
    if in_eigenspace(p, x, 1, 0.0) {
        Some(1)
    } else if in_eigenspace(p, x, -1, 0.0) {
        Some(-1)
    } else {
        None
    }
}

/// Point of `N_+` lying in `component`, with `v = P_1 P_2 x` as the
/// spacelike kernel vector.
pub fn n_plus_witness(sys: &CliffordSystem<Rational>, component: Component) -> Result<WitnessRecord> {
    let (split, case) = analysed(sys)?;
    let home = home_side(case, &split, component)?;
    let p = sys.full_product();
    let (sign_pattern, mut x, n) = joint_eigen_point(sys)?;
    let eps = eigen_sign(&p, &x).ok_or_else(|| Error::IdentityViolated("joint eigenvector is not an eigenvector of P".into()))?;
    let moved = component != Component::Whole && eps != home;
    if moved {
        if sys.r == sys.m {
            return Err(Error::IdentityViolated("moving across eigenspaces needs a spacelike P_m".into()));
        }
        x = sys.apply(sys.m - 1, &x);
    }
    let scale = Rational::one() / n;
    let point = ScaledVector::new(x, scale.clone());
    let v = sys.apply(0, &sys.apply(1, &point.coords));
    let verdict = n_plus_membership(sys, &point.coords)?;
    let stratum = stratum_of_scaled(sys, &point)?;
    let in_component = match component {
        Component::Stratum1 => stratum == StratumLabel::One,
        Component::Stratum2 => stratum == StratumLabel::Two,
        Component::Whole => true,
    };
    let mut checks = BTreeMap::new();
    checks.insert("in_m_plus", scaled_in_m_plus(sys, &point));
    checks.insert("in_component", in_component);
    checks.insert("kernel_vector_unit", scaled_norm(sys, &v, &scale) == Rational::one());
    checks.insert("kernel_vector_in_kernel", in_span(&verdict.basis, &v));
    checks.insert("member", verdict.member);
    checks.insert("in_eigenspace", eigen_sign(&p, &point.coords).is_some());
    Ok(WitnessRecord {
        kind: WitnessKind::NPlusMember,
        component,
        point,
        aux: Auxiliary::Kernel { v, sign_pattern, moved },
        verdict,
        stratum,
        checks,
    })
}

/// `x + y` with `x ∈ E_ε(P)`, `y ∈ E_{−ε}(P)` both non-zero, on `M_+`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedPoint {
    pub eps: i8,
    pub x: ScaledVector<Rational>,
    pub y: ScaledVector<Rational>,
    pub point: ScaledVector<Rational>,
}

/// Small positive rationals tried as mixing coefficients.
fn mixing_coefficients() -> Vec<Rational> {
    let mut out = Vec::new();
    for p in 1..=6i64 {
        for q in 1..=6i64 {
            let t = Rational::ratio(p, q);
            if num_integer::Integer::gcd(&p, &q) == 1 {
                out.push(t);
            }
        }
    }
    out
}

fn combine(a: &[Rational], t: &Rational, b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

/// Orthogonal complement of `{P_j u}` inside `E_{−ε}(P)`, as an orthogonal
/// basis with squares.
fn orthogonal_slot(
    sys: &CliffordSystem<Rational>,
    other_side: &[Vec<Rational>],
    u: &[Rational],
) -> Result<Vec<(Vec<Rational>, Rational)>> {
    let g = sys.metric();
    let normals: Vec<Vec<Rational>> = (0..sys.m).map(|j| sys.apply(j, u)).collect();
    let rows: Vec<Vec<Rational>> = normals
        .iter()
        .map(|nj| other_side.iter().map(|b| inner_unchecked(nj, b, &g)).collect())
        .collect();
    let coeffs = kernel_basis(&DenseMatrix::from_rows(rows)?);
    let vectors: Vec<Vec<Rational>> = coeffs
        .iter()
        .map(|c| {
            let mut w = vec![Rational::zero(); sys.dim()];
            for (ci, b) in c.iter().zip(other_side) {
                if !ci.is_zero() {
                    w = combine(&w, ci, b);
                }
            }
            w
        })
        .collect();
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    orthogonalize(&vectors, &g).map_err(|e| Error::IdentityViolated(format!("orthogonal slot is degenerate: {e}")))
}

/// Candidates `(vector, |square|)` of a given sign: single basis vectors
/// first, then `a + t b` for pairs.
fn signed_candidates(basis: &[(Vec<Rational>, Rational)], sign: i8, pairs: bool) -> Vec<(Vec<Rational>, Rational)> {
    let matching: Vec<&(Vec<Rational>, Rational)> =
        basis.iter().filter(|(_, n)| if sign > 0 { n.is_positive() } else { n.is_negative() }).collect();
    let mut out: Vec<(Vec<Rational>, Rational)> = matching.iter().map(|(v, n)| (v.clone(), n.abs())).collect();
    if pairs {
        let ts = mixing_coefficients();
        for (i, (a, na)) in matching.iter().enumerate() {
            for (b, nb) in matching.iter().skip(i + 1) {
                for t in &ts {
                    out.push((combine(a, t, b), na.abs() + t * t * nb.abs()));
                }
            }
        }
    }
    out
}

/// Builds `x + y ∈ M_+` with `x ∈ E_ε`, `y ∈ E_{−ε}` orthogonal to every
/// `P_j x`, and `⟨y, y⟩` of sign `sigma`.
///
/// With `sigma = −1` the point is `√2 x' + y'`, with `sigma = +1` it is
/// `(x' + y')/√2`, where `x'`, `y'` are unit. Both √-normalisations are kept
/// exact by choosing `x'`, `y'` so that the mixing ratio is rational.
pub fn mixed_point(
    sys: &CliffordSystem<Rational>,
    split: &EigenSplit<Rational>,
    eps: i8,
    sigma: i8,
) -> Result<MixedPoint> {
    let k = if sigma < 0 { Rational::from_integer(2.into()) } else { Rational::one() };
    let g = sys.metric();
    let own = orthogonalize(split.side(eps), &g)?;
    let other = split.side(-eps);
    for pairs in [false, true] {
        for (u, alpha) in signed_candidates(&own, 1, pairs) {
            let slot = orthogonal_slot(sys, other, &u)?;
            for w_pairs in [false, true] {
                for (w, beta) in signed_candidates(&slot, sigma, w_pairs) {
                    let Some(root) = rational_sqrt(&(k.clone() * &alpha * &beta)) else { continue };
                    let rho = root / &alpha;
                    let xr: Vec<Rational> = u.iter().map(|c| c * &rho).collect();
                    let coords: Vec<Rational> = xr.iter().zip(&w).map(|(a, b)| a + b).collect();
                    let n = inner_unchecked(&coords, &coords, &g);
                    if !n.is_positive() {
                        continue;
                    }
                    let scale = Rational::one() / n;
                    return Ok(MixedPoint {
                        eps,
                        x: ScaledVector::new(xr, scale.clone()),
                        y: ScaledVector::new(w, scale.clone()),
                        point: ScaledVector::new(coords, scale),
                    });
                }
            }
        }
    }
    Err(Error::Construction(format!(
        "no rational mixing found for ε = {eps}, ⟨y,y⟩ sign {sigma}"
    )))
}

/// A point of `component` outside `E_+(P) ∪ E_-(P)`, certified not in `N_+`.
///
/// Requires `l > m`.
pub fn inhomogeneity_witness(sys: &CliffordSystem<Rational>, component: Component) -> Result<WitnessRecord> {
    check_parity(sys)?;
    if sys.l <= sys.m {
        return Err(Error::HypothesisUnmet(format!("needs l > m, got l = {}, m = {}", sys.l, sys.m)));
    }
    let (split, case) = analysed(sys)?;
    let eps = home_side(case, &split, component)?;
    let (sigma, expected) = if case.is_d() {
        (1, StratumLabel::Three)
    } else if eps > 0 {
        (-1, StratumLabel::One)
    } else {
        (-1, StratumLabel::Two)
    };
    let mixed = mixed_point(sys, &split, eps, sigma)?;
    let p = sys.full_product();
    let point = mixed.point.clone();
    let verdict = n_plus_membership(sys, &point.coords)?;
    let stratum = stratum_of_scaled(sys, &point)?;
    let mut checks = BTreeMap::new();
    checks.insert("in_m_plus", scaled_in_m_plus(sys, &point));
    checks.insert("stratum", stratum == expected);
    checks.insert(
        "not_in_eigenspaces",
        eigen_sign(&p, &point.coords).is_none()
            && mixed.x.coords.iter().any(|c| !c.is_zero())
            && mixed.y.coords.iter().any(|c| !c.is_zero()),
    );
    checks.insert("not_in_n_plus", !verdict.member);
    let (x, y) = if eps > 0 { (mixed.x, mixed.y) } else { (mixed.y, mixed.x) };
    Ok(WitnessRecord {
        kind: WitnessKind::InhomogeneityPoint,
        component,
        point,
        aux: Auxiliary::Decomposition { x, y },
        verdict,
        stratum,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_family, lift_to_clifford_system};

    fn system(m: usize, r: usize, d: usize) -> CliffordSystem<Rational> {
        let (fam, _) = construct_family(m, r).unwrap();
        lift_to_clifford_system(&fam, d).unwrap()
    }

    #[test]
    fn n_plus_witnesses_for_small_systems() {
        for (m, r, comps) in [
            (4, 0, vec![Component::Stratum1, Component::Stratum2]),
            (4, 4, vec![Component::Whole]),
        ] {
            let sys = system(m, r, 1);
            for c in comps {
                let w = n_plus_witness(&sys, c).unwrap();
                assert!(w.passed(), "({m}, {r}) {c}: {:?}", w.first_failure());
                assert!(w.replay(&sys).unwrap());
                assert!(replay_json(&sys, &w.to_json()).unwrap());
            }
        }
    }

    #[test]
    fn m_four_uses_p_itself() {
        let sys = system(4, 0, 1);
        let rs = commuting_involutions(&sys);
        assert_eq!(rs.len(), 1);
        assert!(rs[0].same_as(&sys.full_product()));
    }

    #[test]
    fn inhomogeneity_points_pass_all_checks() {
        for (m, r) in [(4, 0), (4, 4)] {
            let sys = system(m, r, 1);
            let (_, case) = analysed(&sys).unwrap();
            for c in super::super::strata::components_of(case) {
                let w = inhomogeneity_witness(&sys, c).unwrap();
                assert!(w.passed(), "({m}, {r}) {c}: {:?}", w.first_failure());
                assert!(!w.verdict.member);
                assert!(w.replay(&sys).unwrap());
            }
        }
    }

    #[test]
    fn equal_rank_is_rejected() {
        let sys = system(4, 2, 1);
        assert_eq!(sys.l, 4);
        assert!(matches!(inhomogeneity_witness(&sys, Component::Stratum1), Err(Error::HypothesisUnmet(_))));
    }

    #[test]
    fn tampered_record_does_not_replay() {
        let sys = system(4, 0, 1);
        let w = n_plus_witness(&sys, Component::Stratum1).unwrap();
        let mut j = w.to_json();
        j["verdict"]["member"] = json!(false);
        assert!(!replay_json(&sys, &j).unwrap());
    }
}

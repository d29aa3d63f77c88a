//! Clifford systems `{P_i}` on `ℝ^{2l}_s` and their operator algebra.

mod basis;
mod gram_schmidt;
mod io;
mod operator;
mod sigma;

pub use basis::{
    basis_product_sign, boost_matrix, change_basis, change_basis_unverified,
    decompose_pseudo_orthogonal, flip_matrix, generator_matrix, multiply_generators,
    product_operator, random_pseudo_orthogonal, rotation_matrix, Generator, ProductOperator,
};
pub use gram_schmidt::{gram_schmidt_pseudo, gram_schmidt_pseudo_exact, orthogonalize};
pub use io::{SystemFile, SystemHeader};
pub use operator::{anticommutator_mismatch, Operator, SparseVec};
pub use sigma::{sigma_metric, sigma_metric_eta, SigmaElement};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::metric::inner_unchecked;
use crate::exact::{Metric, Scalar, SignedPermMatrix};

/// `m` operators, symmetric w.r.t. `J_{s,2l-s}`, with
/// `P_iP_j + P_jP_i = 2η_ij I` and `η = J_{r,m-r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordSystem<T> {
    pub l: usize,
    pub s: usize,
    pub m: usize,
    pub r: usize,
    pub operators: Vec<Operator<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one named check, with the first counterexample on failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl Certificate {
    pub fn pass(check: impl Into<String>) -> Self {
        Self { check: check.into(), status: Status::Pass, counterexample: None }
    }

    pub fn fail(check: impl Into<String>, counterexample: Value) -> Self {
        Self { check: check.into(), status: Status::Fail, counterexample: Some(counterexample) }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemCertificate {
    pub passed: bool,
    pub checks: Vec<Certificate>,
}

impl SystemCertificate {
    pub fn first_failure(&self) -> Option<&Certificate> {
        self.checks.iter().find(|c| !c.passed())
    }
}

impl<T: Scalar> CliffordSystem<T> {
    pub fn new_unchecked(l: usize, s: usize, m: usize, r: usize, operators: Vec<Operator<T>>) -> Self {
        Self { l, s, m, r, operators }
    }

    /// Builds a system and checks the relations and symmetry exactly.
    pub fn new(l: usize, s: usize, m: usize, r: usize, operators: Vec<Operator<T>>) -> Result<Self> {
        let sys = Self::new_unchecked(l, s, m, r, operators);
        sys.verify_relations()?;
        Ok(sys)
    }

    pub fn dim(&self) -> usize {
        2 * self.l
    }

    /// Ambient metric `J_{s,2l-s}`.
    pub fn metric(&self) -> Metric {
        Metric::new(self.s, 2 * self.l - self.s)
    }

    /// `η = J_{r,m-r}`.
    pub fn eta(&self) -> Metric {
        Metric::new(self.r, self.m - self.r)
    }

    pub fn apply(&self, i: usize, x: &[T]) -> Vec<T> {
        self.operators[i].apply(x)
    }

    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        inner_unchecked(u, v, &self.metric())
    }

    /// Whether every operator is a signed permutation.
    pub fn perms(&self) -> Option<Vec<&SignedPermMatrix>> {
        self.operators.iter().map(Operator::as_perm).collect()
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::InvalidParameters(format!("m must be at least 2, got {}", self.m)));
        }
        if self.r > self.m {
            return Err(Error::InvalidParameters(format!("r = {} exceeds m = {}", self.r, self.m)));
        }
        if self.s > 2 * self.l {
            return Err(Error::InvalidParameters(format!("index s = {} exceeds 2l", self.s)));
        }
        if self.r > 0 && self.s != self.l {
            return Err(Error::InvalidParameters(format!(
                "r > 0 forces s = l, got s = {}, l = {}",
                self.s, self.l
            )));
        }
        if self.operators.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: self.operators.len() });
        }
        if let Some(op) = self.operators.iter().find(|op| op.order() != 2 * self.l) {
            return Err(Error::DimensionMismatch { expected: 2 * self.l, found: op.order() });
        }
        Ok(())
    }

    fn relation_certificate(&self) -> Certificate {
        let eta = self.eta();
        for i in 0..self.m {
            for j in i..self.m {
                let e = if i == j { eta.sign(i) } else { 0 };
                if let Some((row, col, found, expected)) =
                    anticommutator_mismatch(&self.operators[i], &self.operators[j], e)
                {
                    return Certificate::fail(
                        "relations",
                        json!({
                            "pair": [i + 1, j + 1],
                            "entry": [row + 1, col + 1],
                            "found": found.to_json(),
                            "expected": expected.to_json(),
                        }),
                    );
                }
            }
        }
        Certificate::pass("relations")
    }

    fn symmetry_certificate(&self) -> Certificate {
        let g = self.metric();
        match self.operators.iter().position(|op| !op.is_symmetric_wrt(&g)) {
            Some(i) => Certificate::fail("symmetry", json!({ "operator": i + 1 })),
            None => Certificate::pass("symmetry"),
        }
    }

    /// Exact check of the shape, the defining relations and symmetry.
    pub fn verify_relations(&self) -> Result<()> {
        self.check_shape()?;
        for cert in [self.relation_certificate(), self.symmetry_certificate()] {
            if let Some(ce) = cert.counterexample {
                return Err(Error::Verification(format!("{}: {ce}", cert.check)));
            }
        }
        Ok(())
    }

    /// `P_{i_1} ⋯ P_{i_k}` (0-based indices).
    pub fn product(&self, indices: &[usize]) -> Operator<T> {
        let mut it = indices.iter();
        let first = it.next().expect("empty product");
        it.fold(self.operators[*first].clone(), |acc, &i| acc.compose(&self.operators[i]))
    }

    /// `P = P_1 ⋯ P_m`.
    pub fn full_product(&self) -> Operator<T> {
        self.product(&(0..self.m).collect::<Vec<_>>())
    }

    pub fn to_real(&self) -> CliffordSystem<f64> {
        CliffordSystem {
            l: self.l,
            s: self.s,
            m: self.m,
            r: self.r,
            operators: self.operators.iter().map(|op| op.map_scalar(|x| x.to_f64_lossy())).collect(),
        }
    }

    /// Header fields for reports.
    pub fn header(&self) -> SystemHeader {
        SystemHeader { l: self.l, s: self.s, m: self.m, r: self.r }
    }
}

fn random_small<T: Scalar>(rng: &mut impl Rng) -> T {
    T::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4))
}

/// Shape, relations, symmetry, and two sampled identities:
/// `QQ' + Q'Q = 2⟨Q,Q'⟩I` on random Σ-elements and
/// `⟨Qx, Q'x⟩ = ⟨Q,Q'⟩⟨x,x⟩` on random points.
pub fn verify_system<T: Scalar>(sys: &CliffordSystem<T>, seed: u64) -> SystemCertificate {
    let mut checks = Vec::new();
    if let Err(e) = sys.check_shape() {
        checks.push(Certificate::fail("shape", json!({ "error": e.to_string() })));
        return SystemCertificate { passed: false, checks };
    }
    checks.push(Certificate::pass("shape"));
    checks.push(sys.relation_certificate());
    checks.push(sys.symmetry_certificate());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const SAMPLES: usize = 4;
    let tol = T::default_tol();

    let mut anticomm = Certificate::pass("sigma_anticommutator");
    'outer: for _ in 0..SAMPLES {
        let c: Vec<T> = (0..sys.m).map(|_| random_small(&mut rng)).collect();
        let c2: Vec<T> = (0..sys.m).map(|_| random_small(&mut rng)).collect();
        let q = SigmaElement::new(sys, c.clone());
        let q2 = SigmaElement::new(sys, c2.clone());
        let inner = sigma_metric(&q, &q2).expect("same system");
        let a = q.operator();
        let b = q2.operator();
        let two = inner.clone() + inner.clone();
        for j in 0..sys.dim() {
            let mut e = SparseVec::new();
            e.insert(j, T::one());
            let mut col = a.apply_sparse(&b.apply_sparse(&e));
            for (i, v) in b.apply_sparse(&a.apply_sparse(&e)) {
                let slot = col.entry(i).or_insert_with(T::zero);
                *slot = slot.clone() + v;
            }
            for (&i, v) in &col {
                let expected = if i == j { two.clone() } else { T::zero() };
                if !(v.clone() - expected).near_zero(tol) {
                    anticomm = Certificate::fail(
                        "sigma_anticommutator",
                        json!({
                            "c": c.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                            "c_prime": c2.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                            "entry": [i + 1, j + 1],
                        }),
                    );
                    break 'outer;
                }
            }
            if !col.contains_key(&j) && !two.near_zero(tol) {
                anticomm = Certificate::fail(
                    "sigma_anticommutator",
                    json!({ "entry": [j + 1, j + 1], "reason": "missing diagonal" }),
                );
                break 'outer;
            }
        }
    }
    checks.push(anticomm);

    let mut isometry = Certificate::pass("sigma_isometry");
    for _ in 0..SAMPLES {
        let c: Vec<T> = (0..sys.m).map(|_| random_small(&mut rng)).collect();
        let c2: Vec<T> = (0..sys.m).map(|_| random_small(&mut rng)).collect();
        let x: Vec<T> = (0..sys.dim()).map(|_| random_small(&mut rng)).collect();
        let q = SigmaElement::new(sys, c.clone());
        let q2 = SigmaElement::new(sys, c2);
        let lhs = sys.inner(&q.apply(&x), &q2.apply(&x));
        let rhs = sigma_metric(&q, &q2).expect("same system") * sys.inner(&x, &x);
        if !(lhs.clone() - rhs.clone()).near_zero(tol.max(tol * rhs.to_f64_lossy().abs())) {
            isometry = Certificate::fail(
                "sigma_isometry",
                json!({
                    "x": x.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                    "lhs": lhs.to_json(),
                    "rhs": rhs.to_json(),
                }),
            );
            break;
        }
    }
    checks.push(isometry);

    let passed = checks.iter().all(Certificate::passed);
    SystemCertificate { passed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_family, lift_to_clifford_system};
    use crate::exact::Rational;

    fn system(m: usize, r: usize) -> CliffordSystem<Rational> {
        let (fam, _) = construct_family(m, r).unwrap();
        lift_to_clifford_system(&fam, 1).unwrap()
    }

    #[test]
    fn constructed_systems_pass() {
        for (m, r) in [(4, 0), (4, 4), (4, 2), (3, 1)] {
            let cert = verify_system(&system(m, r), 7);
            assert!(cert.passed, "({m},{r}): {:?}", cert.first_failure());
        }
    }

    #[test]
    fn doubled_operator_fails_at_its_diagonal_relation() {
        let mut sys = system(4, 0);
        let p2 = sys.operators[1].as_perm().unwrap().clone();
        sys.operators[1] = Operator::combination(vec![(Rational::ratio(2, 1), p2)]);
        let cert = verify_system(&sys, 0);
        assert!(!cert.passed);
        let fail = cert.first_failure().unwrap();
        assert_eq!(fail.check, "relations");
        assert_eq!(fail.counterexample.as_ref().unwrap()["pair"], json!([2, 2]));
    }

    #[test]
    fn shape_errors() {
        let mut sys = system(4, 2);
        sys.s = 3;
        assert!(sys.verify_relations().is_err());
        let mut sys = system(4, 0);
        sys.operators.pop();
        assert!(matches!(sys.check_shape(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn real_copy_passes() {
        let sys = system(4, 4).to_real();
        assert!(verify_system(&sys, 3).passed);
    }
}

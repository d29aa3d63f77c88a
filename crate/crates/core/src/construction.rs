//! Orthogonal families `{A_i}` with `A_iA_j + A_jA_i = 2η_ij E`, their
//! inductive construction, and the block lift to Clifford systems.

use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordSystem, Operator};
use crate::error::{Error, Result};
use crate::exact::{Metric, Scalar, SignedPermMatrix};

/// `m` orthogonal signed permutations of order `l` with
/// `A_iA_j + A_jA_i = 2η_ij E_l`, `η = J_{r,m-r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalFamily {
    pub m: usize,
    pub r: usize,
    pub order: usize,
    pub matrices: Vec<SignedPermMatrix>,
}

/// One step of a derivation; `(m, r)` is the signature produced by the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Base { m: usize, r: usize },
    RPlusOne { m: usize, r: usize },
    Full { m: usize, r: usize },
    Zero { m: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstructionTrace {
    pub steps: Vec<Step>,
}

impl ConstructionTrace {
    /// Rebuilds the family by running the recorded steps from the base.
    pub fn replay(&self) -> Result<OrthogonalFamily> {
        let mut steps = self.steps.iter();
        let mut fam = match steps.next() {
            Some(Step::Base { m, r }) => base_family(*m, *r)?,
            _ => return Err(Error::Malformed("trace must start with a base step".into())),
        };
        for step in steps {
            fam = match step {
                Step::Base { .. } => {
                    return Err(Error::Malformed("base step in the middle of a trace".into()))
                }
                Step::RPlusOne { .. } => extend_r_plus_one(&fam)?,
                Step::Full { .. } => extend_to_full(&fam)?,
                Step::Zero { .. } => extend_to_zero(&fam)?,
            };
            let (m, r) = match step {
                Step::Base { m, r }
                | Step::RPlusOne { m, r }
                | Step::Full { m, r }
                | Step::Zero { m, r } => (*m, *r),
            };
            if (fam.m, fam.r) != (m, r) {
                return Err(Error::Malformed(format!(
                    "trace step claims ({m},{r}) but produced ({},{})",
                    fam.m, fam.r
                )));
            }
        }
        Ok(fam)
    }
}

impl OrthogonalFamily {
    pub fn eta(&self) -> Metric {
        Metric::new(self.r, self.m - self.r)
    }

    /// Exact check of the anticommutation relations and the skew/symmetric
    /// split; returns the first failing pair on error.
    pub fn verify(&self) -> Result<()> {
        if self.matrices.len() != self.m {
            return Err(Error::Verification(format!(
                "expected {} matrices, found {}",
                self.m,
                self.matrices.len()
            )));
        }
        if self.matrices.iter().any(|a| a.order() != self.order) {
            return Err(Error::Verification("matrix order differs from family order".into()));
        }
        let eta = self.eta();
        for i in 0..self.m {
            let a = &self.matrices[i];
            if !a.compose(a).is_scalar(eta.sign(i)) {
                return Err(Error::Verification(format!("A_{0}A_{0} != {1}E", i + 1, eta.sign(i))));
            }
            for j in i + 1..self.m {
                let b = &self.matrices[j];
                if a.compose(b) != b.compose(a).neg() {
                    return Err(Error::Verification(format!(
                        "A_{}A_{} + A_{}A_{} != 0",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
            let ok = if i < self.r { a.is_skew_symmetric() } else { a.is_symmetric() };
            if !ok {
                return Err(Error::Verification(format!(
                    "A_{} should be {}",
                    i + 1,
                    if i < self.r { "skew-symmetric" } else { "symmetric" }
                )));
            }
        }
        Ok(())
    }
}

fn perm(rows: &[&[i8]]) -> SignedPermMatrix {
    SignedPermMatrix::from_rows(rows).expect("fixed table is a signed permutation")
}

fn finish(m: usize, r: usize, matrices: Vec<SignedPermMatrix>) -> Result<OrthogonalFamily> {
    let order = matrices[0].order();
    let fam = OrthogonalFamily { m, r, order, matrices };
    fam.verify().map_err(|e| Error::Construction(format!("({m},{r}): {e}")))?;
    Ok(fam)
}

/// Hand-written families for `m ∈ {1, 2}`.
pub fn base_family(m: usize, r: usize) -> Result<OrthogonalFamily> {
    let matrices = match (m, r) {
        (1, 0) => vec![perm(&[&[1]])],
        (1, 1) => vec![perm(&[&[0, -1], &[1, 0]])],
        (2, 0) => vec![perm(&[&[1, 0], &[0, -1]]), perm(&[&[0, -1], &[-1, 0]])],
        (2, 1) => vec![perm(&[&[0, 1], &[-1, 0]]), perm(&[&[1, 0], &[0, -1]])],
        (2, 2) => vec![
            perm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]),
            perm(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]),
        ],
        _ => {
            return Err(Error::InvalidParameters(format!(
                "no base family for (m, r) = ({m}, {r})"
            )))
        }
    };
    finish(m, r, matrices)
}

fn check_input(fam: &OrthogonalFamily) -> Result<()> {
    fam.verify().map_err(|e| Error::Precondition(format!("input family is invalid: {e}")))
}

/// `(m, r) → (m+2, r+1)`, doubling the order.
pub fn extend_r_plus_one(fam: &OrthogonalFamily) -> Result<OrthogonalFamily> {
    check_input(fam)?;
    let (m, r) = (fam.m, fam.r);
    let e = SignedPermMatrix::identity(fam.order);
    let swap = perm(&[&[0, 1], &[1, 0]]);
    let twist = perm(&[&[0, 1], &[-1, 0]]);
    let split = perm(&[&[1, 0], &[0, -1]]);
    let a = &fam.matrices;
    let mut out = Vec::with_capacity(m + 2);
    for j in 1..=m + 2 {
        out.push(if j <= r {
            swap.kronecker(&a[j - 1])
        } else if j == r + 1 {
            twist.kronecker(&e)
        } else if j <= m + 1 {
            swap.kronecker(&a[j - 2])
        } else {
            split.kronecker(&e)
        });
    }
    finish(m + 2, r + 1, out)
}

/// `(m, 0) → (m+2, m+2)`, quadrupling the order.
pub fn extend_to_full(fam: &OrthogonalFamily) -> Result<OrthogonalFamily> {
    check_input(fam)?;
    if fam.r != 0 {
        return Err(Error::Precondition(format!("extend_to_full needs r = 0, got r = {}", fam.r)));
    }
    let m = fam.m;
    let e = SignedPermMatrix::identity(fam.order);
    let k1 = perm(&[&[0, 0, 0, -1], &[0, 0, -1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]]);
    let k2 = perm(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    let k3 = perm(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]);
    let mut out: Vec<_> = fam.matrices.iter().map(|a| k1.kronecker(a)).collect();
    out.push(k2.kronecker(&e));
    out.push(k3.kronecker(&e));
    finish(m + 2, m + 2, out)
}

/// `(m, m) → (m+2, 0)`, doubling the order.
pub fn extend_to_zero(fam: &OrthogonalFamily) -> Result<OrthogonalFamily> {
    check_input(fam)?;
    if fam.r != fam.m {
        return Err(Error::Precondition(format!(
            "extend_to_zero needs r = m, got (m, r) = ({}, {})",
            fam.m, fam.r
        )));
    }
    let m = fam.m;
    let e = SignedPermMatrix::identity(fam.order);
    let twist = perm(&[&[0, 1], &[-1, 0]]);
    let split = perm(&[&[1, 0], &[0, -1]]);
    let swap = perm(&[&[0, 1], &[1, 0]]);
    let mut out: Vec<_> = fam.matrices.iter().map(|a| twist.kronecker(a)).collect();
    out.push(split.kronecker(&e));
    out.push(swap.kronecker(&e));
    finish(m + 2, 0, out)
}

fn derivation(m: usize, r: usize, steps: &mut Vec<Step>) {
    if m <= 2 {
        steps.push(Step::Base { m, r });
    } else if r == m {
        derivation(m - 2, 0, steps);
        steps.push(Step::Full { m, r });
    } else if r == 0 {
        derivation(m - 2, m - 2, steps);
        steps.push(Step::Zero { m, r });
    } else {
        derivation(m - 2, r - 1, steps);
        steps.push(Step::RPlusOne { m, r });
    }
}

/// The canonical derivation for `(m, r)`: base cases for `m ≤ 2`, then one
/// extension per two units of `m`.
pub fn construct_family(m: usize, r: usize) -> Result<(OrthogonalFamily, ConstructionTrace)> {
    if m == 0 || r > m {
        return Err(Error::InvalidParameters(format!(
            "need m >= 1 and 0 <= r <= m, got (m, r) = ({m}, {r})"
        )));
    }
    let mut steps = Vec::new();
    derivation(m, r, &mut steps);
    let trace = ConstructionTrace { steps };
    let fam = trace.replay()?;
    Ok((fam, trace))
}

/// Clifford system on `ℝ^{2dl}_{dl}`: `P_i` is `2d` copies of `A_i` placed
/// on the block anti-diagonal for `i ≤ r` and on the block diagonal otherwise.
pub fn lift_to_clifford_system<T: Scalar>(
    fam: &OrthogonalFamily,
    d: usize,
) -> Result<CliffordSystem<T>> {
    if d == 0 {
        return Err(Error::InvalidParameters("d must be at least 1".into()));
    }
    if fam.m < 2 {
        return Err(Error::InvalidParameters(format!(
            "Clifford systems need m >= 2, got m = {}",
            fam.m
        )));
    }
    check_input(fam)?;
    let n = 2 * d;
    let anti = SignedPermMatrix::new((0..n).rev().collect(), vec![1; n])?;
    let diag = SignedPermMatrix::identity(n);
    let operators = fam
        .matrices
        .iter()
        .enumerate()
        .map(|(i, a)| {
            Operator::Perm(if i < fam.r { anti.kronecker(a) } else { diag.kronecker(a) })
        })
        .collect();
    let l = d * fam.order;
    let sys = CliffordSystem::new_unchecked(l, l, fam.m, fam.r, operators);
    sys.verify_relations()
        .map_err(|e| Error::Construction(format!("lift of ({},{}) with d = {d}: {e}", fam.m, fam.r)))?;
    Ok(sys)
}

/// Reference table of minimal orders: `1, 2, 4, 4, 8, 8, 8, 8` for
/// `m = 0..7`, then `l(i) = 16 l(i - 8)`.
pub fn minimal_order_lookup(m: usize) -> u128 {
    const TABLE: [u128; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    let mut l = TABLE[m % 8];
    for _ in 0..m / 8 {
        l *= 16;
    }
    l
}

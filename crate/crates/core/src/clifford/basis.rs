//! Basis changes of Σ, the product operators `Q_{q,p}`, and the generators of
//! `O(r, m-r)`.

use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::{Certificate, CliffordSystem, Operator, SigmaElement, SparseVec};
use crate::error::{Error, Result};
use crate::exact::{pseudo_orthogonality_defect, DenseMatrix, Metric, Rational, Scalar};

fn check_matrix<T: Scalar>(a: &DenseMatrix<T>, eta: &Metric) -> Result<()> {
    if a.rows() != eta.dim() || a.cols() != eta.dim() {
        return Err(Error::DimensionMismatch { expected: eta.dim(), found: a.rows() });
    }
    let defect = pseudo_orthogonality_defect(a, eta)?;
    let ok = if T::EXACT {
        defect.is_zero_within(0.0)
    } else {
        defect.is_zero_within(1e-12)
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotPseudoOrthogonal)
    }
}

/// `Q_k = Σ_i P_i A_ik` without re-checking the relations of the result.
///
/// The relations of `{Q_k}` follow from those of `{P_i}` and `ᵗAηA = η`,
/// which is checked here.
pub fn change_basis_unverified<T: Scalar>(
    sys: &CliffordSystem<T>,
    a: &DenseMatrix<T>,
) -> Result<CliffordSystem<T>> {
    check_matrix(a, &sys.eta())?;
    let operators = (0..sys.m)
        .map(|k| SigmaElement::new(sys, a.column(k)).operator())
        .collect();
    Ok(CliffordSystem::new_unchecked(sys.l, sys.s, sys.m, sys.r, operators))
}

/// `Q_k = Σ_i P_i A_ik` for `A ∈ O(r, m-r)`; the new system is verified.
pub fn change_basis<T: Scalar>(sys: &CliffordSystem<T>, a: &DenseMatrix<T>) -> Result<CliffordSystem<T>> {
    let out = change_basis_unverified(sys, a)?;
    out.verify_relations()?;
    Ok(out)
}

/// `Q_{q,p} = P_q ⋯ P_{q+p-1}` with its four certificates.
#[derive(Debug, Clone)]
pub struct ProductOperator<T> {
    pub q: usize,
    pub p: usize,
    pub operator: Operator<T>,
    pub certificates: Vec<Certificate>,
}

fn check_parity<T>(sys: &CliffordSystem<T>) -> Result<()> {
    if sys.m % 4 != 0 || sys.r % 2 != 0 {
        return Err(Error::InvalidParameters(format!(
            "needs m ≡ 0 mod 4 and r even, got (m, r) = ({}, {})",
            sys.m, sys.r
        )));
    }
    Ok(())
}

/// Builds `Q_{q,p}` (1-based `q`) and certifies exactly that it equals the
/// reversed product, is symmetric, is involutive and anticommutes with each
/// `P_a`, `q ≤ a ≤ q+p-1`.
pub fn product_operator<T: Scalar>(
    sys: &CliffordSystem<T>,
    q: usize,
    p: usize,
) -> Result<ProductOperator<T>> {
    check_parity(sys)?;
    if q % 2 == 0 || p % 4 != 0 || p == 0 || q == 0 || q + p - 1 > sys.m {
        return Err(Error::InvalidParameters(format!(
            "need odd q, p ≡ 0 mod 4 and q + p - 1 ≤ m, got q = {q}, p = {p}, m = {}",
            sys.m
        )));
    }
    let idx: Vec<usize> = (q - 1..q + p - 1).collect();
    let op = sys.product(&idx);
    let rev: Vec<usize> = idx.iter().rev().copied().collect();
    let mut certificates = Vec::new();

    certificates.push(if op.same_as(&sys.product(&rev)) {
        Certificate::pass("reversed_product")
    } else {
        Certificate::fail("reversed_product", json!({ "q": q, "p": p }))
    });
    certificates.push(if op.is_symmetric_wrt(&sys.metric()) {
        Certificate::pass("symmetric")
    } else {
        Certificate::fail("symmetric", json!({ "q": q, "p": p }))
    });
    certificates.push(if op.compose(&op).is_scalar(1) {
        Certificate::pass("involutive")
    } else {
        Certificate::fail("involutive", json!({ "q": q, "p": p }))
    });
    let bad = idx.iter().copied().find(|&a| {
        let pa = &sys.operators[a];
        !pa.compose(&op).same_as(&op.compose(pa).neg())
    });
    certificates.push(match bad {
        None => Certificate::pass("anticommutes"),
        Some(a) => Certificate::fail("anticommutes", json!({ "a": a + 1 })),
    });
    if let Some(c) = certificates.iter().find(|c| !c.passed()) {
        return Err(Error::IdentityViolated(format!("Q_({q},{p}): {} failed", c.check)));
    }
    Ok(ProductOperator { q, p, operator: op, certificates })
}

/// `ε` with `Q_1 ⋯ Q_m = ε P` for the basis `Q_k = Σ_i P_i A_ik`.
pub fn basis_product_sign<T: Scalar>(sys: &CliffordSystem<T>, a: &DenseMatrix<T>) -> Result<i8> {
    check_parity(sys)?;
    let changed = change_basis_unverified(sys, a)?;
    let p = sys.full_product();
    let tol = T::default_tol();
    let mut eps: Option<i8> = None;
    for j in 0..sys.dim() {
        let mut v = SparseVec::new();
        v.insert(j, T::one());
        for op in changed.operators.iter().rev() {
            v = op.apply_sparse(&v);
        }
        let target = p.column(j);
        for sign in [1i8, -1] {
            if eps.is_some_and(|e| e != sign) {
                continue;
            }
            let s = T::ratio(sign as i64, 1);
            let keys: std::collections::BTreeSet<usize> = v.keys().chain(target.keys()).copied().collect();
            let matches = keys.iter().all(|k| {
                let x = v.get(k).cloned().unwrap_or_else(T::zero);
                let y = target.get(k).cloned().unwrap_or_else(T::zero);
                (x - s.clone() * y).near_zero(tol)
            });
            if matches {
                eps = Some(sign);
                break;
            } else if eps == Some(sign) {
                eps = None;
            }
        }
        if eps.is_none() {
            return Err(Error::IdentityViolated(format!(
                "Q_1⋯Q_m is neither P nor -P (column {})",
                j + 1
            )));
        }
    }
    eps.ok_or_else(|| Error::IdentityViolated("empty system".into()))
}

/// Generators of `O(r, m-r)` with 1-based plane indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `R_{a,a+1}(t)`, a rotation inside one sign block.
    Rotation { a: usize, t: f64 },
    /// `S_{1,r+1}(t)`, the boost mixing coordinates `1` and `r+1`.
    Boost { t: f64 },
    /// `T_1 = (-J_{r-1,1}) ⊕ E_{m-r}`.
    T1,
    /// `T_2 = E_r ⊕ (-J_{m-r-1,1})`.
    T2,
}

/// `R_{a,a+1}` with the given cosine and sine (0-based `a`).
pub fn rotation_matrix<T: Scalar>(m: usize, a: usize, c: T, s: T) -> DenseMatrix<T> {
    let mut g = DenseMatrix::identity(m);
    g[(a, a)] = c.clone();
    g[(a, a + 1)] = -s.clone();
    g[(a + 1, a)] = s;
    g[(a + 1, a + 1)] = c;
    g
}

/// `S_{1,r+1}` with the given hyperbolic cosine and sine.
pub fn boost_matrix<T: Scalar>(eta: &Metric, ch: T, sh: T) -> DenseMatrix<T> {
    let r = eta.neg;
    let mut g = DenseMatrix::identity(eta.dim());
    g[(0, 0)] = ch.clone();
    g[(0, r)] = sh.clone();
    g[(r, 0)] = sh;
    g[(r, r)] = ch;
    g
}

/// Diagonal matrix flipping one coordinate (0-based).
pub fn flip_matrix<T: Scalar>(m: usize, i: usize) -> DenseMatrix<T> {
    let mut g = DenseMatrix::identity(m);
    g[(i, i)] = -T::one();
    g
}

pub fn generator_matrix(gen: &Generator, eta: &Metric) -> DenseMatrix<f64> {
    let m = eta.dim();
    match *gen {
        Generator::Rotation { a, t } => rotation_matrix(m, a - 1, t.cos(), t.sin()),
        Generator::Boost { t } => boost_matrix(eta, t.cosh(), t.sinh()),
        Generator::T1 => flip_matrix(m, eta.neg - 1),
        Generator::T2 => flip_matrix(m, m - 1),
    }
}

fn admissible_rotation(eta: &Metric, a: usize) -> bool {
    a + 1 < eta.dim() && a + 1 != eta.neg
}

/// Random element of `O(r, m-r)` with rational entries: a product of
/// `count` generators, using Pythagorean rotations
/// `((p²-q²)/(p²+q²), 2pq/(p²+q²))`, rational boosts
/// `((p²+q²)/(p²-q²), 2pq/(p²-q²))` and the flips `T_1`, `T_2`.
pub fn random_pseudo_orthogonal(eta: &Metric, count: usize, rng: &mut impl Rng) -> DenseMatrix<Rational> {
    let m = eta.dim();
    let r = eta.neg;
    let mut acc = DenseMatrix::<Rational>::identity(m);
    let rotations: Vec<usize> = (0..m).filter(|&a| admissible_rotation(eta, a)).collect();
    for _ in 0..count {
        let g = match rng.gen_range(0..4) {
            0 | 1 if !rotations.is_empty() => {
                let a = rotations[rng.gen_range(0..rotations.len())];
                let (p, q) = (rng.gen_range(1..=4i64), rng.gen_range(1..=4i64));
                let n = p * p + q * q;
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                rotation_matrix(m, a, Rational::ratio(p * p - q * q, n), Rational::ratio(sign * 2 * p * q, n))
            }
            2 if r > 0 && r < m => {
                let q = rng.gen_range(1..=3i64);
                let p = q + rng.gen_range(1..=2i64);
                let d = p * p - q * q;
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                boost_matrix(eta, Rational::ratio(p * p + q * q, d), Rational::ratio(sign * 2 * p * q, d))
            }
            _ => {
                if r > 0 && (r == m || rng.gen_bool(0.5)) {
                    flip_matrix(m, r - 1)
                } else {
                    flip_matrix(m, m - 1)
                }
            }
        };
        acc = g.mul(&acc).expect("square matrices of equal order");
    }
    acc
}

fn left_apply(b: &mut DenseMatrix<f64>, gen: &Generator, eta: &Metric) {
    *b = generator_matrix(gen, eta).mul(b).expect("square matrices of equal order");
}

fn inverse_generator(gen: &Generator) -> Generator {
    match *gen {
        Generator::Rotation { a, t } => Generator::Rotation { a, t: -t },
        Generator::Boost { t } => Generator::Boost { t: -t },
        other => other,
    }
}

/// Writes `A ∈ O(r, m-r)` as a product of generators.
///
/// Left-multiplies `A` column by column: Givens rotations move each
/// column's mass inside a sign block to the pivot row, a boost (conjugated
/// by quarter-turn rotations when the pivot is not the first coordinate)
/// clears the cross-block entry, and half-turn rotations pair up remaining
/// signs. What is left is `E`, `T_1`, `T_2` or `T_1T_2`. The returned list
/// multiplies out to `A`.
pub fn decompose_pseudo_orthogonal(a: &DenseMatrix<f64>, eta: &Metric) -> Result<Vec<Generator>> {
    let m = eta.dim();
    if a.rows() != m || a.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: a.rows() });
    }
    if !pseudo_orthogonality_defect(a, eta)?.is_zero_within(1e-9) {
        return Err(Error::NotPseudoOrthogonal);
    }
    let r = eta.neg;
    let mut b = a.clone();
    let mut applied: Vec<Generator> = Vec::new();
    let push = |b: &mut DenseMatrix<f64>, g: Generator, applied: &mut Vec<Generator>| {
        left_apply(b, &g, eta);
        applied.push(g);
    };
    let givens = |b: &DenseMatrix<f64>, col: usize, row: usize| -> f64 {
        (-b[(row + 1, col)]).atan2(b[(row, col)])
    };

    for col in 0..m {
        let (block_start, block_end) = if col < r { (col, r) } else { (col, m) };
        for row in (block_start..block_end.saturating_sub(1)).rev() {
            if b[(row + 1, col)].abs() > 1e-15 {
                let t = givens(&b, col, row);
                push(&mut b, Generator::Rotation { a: row + 1, t }, &mut applied);
            }
        }
        if col < r && r < m {
            for row in (r..m - 1).rev() {
                if b[(row + 1, col)].abs() > 1e-15 {
                    let t = givens(&b, col, row);
                    push(&mut b, Generator::Rotation { a: row + 1, t }, &mut applied);
                }
            }
            if b[(r, col)].abs() > 1e-15 {
                let quarter: Vec<Generator> = (0..col)
                    .rev()
                    .map(|a| Generator::Rotation { a: a + 1, t: std::f64::consts::FRAC_PI_2 })
                    .collect();
                for g in &quarter {
                    push(&mut b, *g, &mut applied);
                }
                let (alpha, beta) = (b[(0, col)], b[(r, col)]);
                let ratio = -beta / alpha;
                if !(ratio.abs() < 1.0) {
                    return Err(Error::NonConvergence(format!(
                        "boost pivot |{beta}/{alpha}| is not below 1"
                    )));
                }
                push(&mut b, Generator::Boost { t: ratio.atanh() }, &mut applied);
                for g in quarter.iter().rev() {
                    push(&mut b, inverse_generator(g), &mut applied);
                }
            }
        }
    }

    let mut residual = Vec::new();
    for (start, end, flip) in [(0, r, Generator::T1), (r, m, Generator::T2)] {
        if end == start {
            continue;
        }
        for row in start..end - 1 {
            if b[(row, row)] < 0.0 {
                push(&mut b, Generator::Rotation { a: row + 1, t: std::f64::consts::PI }, &mut applied);
            }
        }
        if b[(end - 1, end - 1)] < 0.0 {
            residual.push(flip);
        }
    }
    let mut out: Vec<Generator> = applied
        .iter()
        .filter(|g| !matches!(g, Generator::Rotation { t, .. } if t.abs() < 1e-15))
        .map(inverse_generator)
        .collect();
    out.extend(residual);
    Ok(out)
}

/// Product of generator matrices, left to right.
pub fn multiply_generators(gens: &[Generator], eta: &Metric) -> DenseMatrix<f64> {
    gens.iter().fold(DenseMatrix::identity(eta.dim()), |acc, g| {
        acc.mul(&generator_matrix(g, eta)).expect("square matrices of equal order")
    })
}

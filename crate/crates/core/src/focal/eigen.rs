//! Eigenspaces of `P = P_1 ⋯ P_m`, their signatures, and the case list that
//! governs the topology of the focal variety.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::clifford::{CliffordSystem, Operator};
use crate::error::{Error, Result};
use crate::exact::metric::inner_unchecked;
use crate::exact::{gram_matrix, kernel_basis, signature_of_gram, DenseMatrix, Scalar};

pub(crate) fn check_parity<T>(sys: &CliffordSystem<T>) -> Result<()> {
    if sys.m % 4 != 0 || sys.r % 2 != 0 {
        return Err(Error::InvalidParameters(format!(
            "needs m ≡ 0 mod 4 and r even, got (m, r) = ({}, {})",
            sys.m, sys.r
        )));
    }
    Ok(())
}

/// `E_+(P)` and `E_-(P)` with their inertias `(neg, zero, pos)`.
#[derive(Debug, Clone)]
pub struct EigenSplit<T> {
    pub plus: Vec<Vec<T>>,
    pub minus: Vec<Vec<T>>,
    pub plus_inertia: (usize, usize, usize),
    pub minus_inertia: (usize, usize, usize),
    /// Index (number of negative directions) of `E_+(P)`.
    pub s1: usize,
    /// Index of `E_-(P)`.
    pub s2: usize,
}

impl<T: Scalar> EigenSplit<T> {
    pub fn dims(&self) -> (usize, usize) {
        (self.plus.len(), self.minus.len())
    }

    /// Basis of `E_ε(P)`.
    pub fn side(&self, eps: i8) -> &[Vec<T>] {
        if eps > 0 {
            &self.plus
        } else {
            &self.minus
        }
    }

    /// Whether `E_ε(P)` meets the unit pseudo-sphere.
    pub fn meets_sphere(&self, eps: i8) -> bool {
        let inertia = if eps > 0 { self.plus_inertia } else { self.minus_inertia };
        inertia.2 > 0
    }
}

fn eigenvectors<T: Scalar>(p: &Operator<T>, eps: i8) -> Vec<Vec<T>> {
    let n = p.order();
    let mut shifted = p.to_dense();
    let e = T::ratio(eps as i64, 1);
    for i in 0..n {
        shifted[(i, i)] = shifted[(i, i)].clone() - e.clone();
    }
    kernel_basis(&shifted)
}

/// Exact bases of `ker(I ∓ P)`, checked to be `l`-dimensional, mutually
/// orthogonal and non-degenerate.
pub fn eigensplit<T: Scalar>(sys: &CliffordSystem<T>) -> Result<EigenSplit<T>> {
    check_parity(sys)?;
    let p = sys.full_product();
    let (plus, minus) = match p.as_perm() {
        Some(perm) => perm.involution_eigenbasis()?,
        None => (eigenvectors(&p, 1), eigenvectors(&p, -1)),
    };
    if plus.len() != sys.l || minus.len() != sys.l {
        return Err(Error::IdentityViolated(format!(
            "eigenspaces of P have dimensions ({}, {}), expected ({l}, {l})",
            plus.len(),
            minus.len(),
            l = sys.l
        )));
    }
    let g = sys.metric();
    for (i, u) in plus.iter().enumerate() {
        for (j, v) in minus.iter().enumerate() {
            if !inner_unchecked(u, v, &g).near_zero(T::default_tol()) {
                return Err(Error::IdentityViolated(format!(
                    "E+ vector {} and E- vector {} are not orthogonal",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let plus_inertia = signature_of_gram(&gram_matrix(&plus, &g))?;
    let minus_inertia = signature_of_gram(&gram_matrix(&minus, &g))?;
    if plus_inertia.1 != 0 || minus_inertia.1 != 0 {
        return Err(Error::IdentityViolated("an eigenspace of P is degenerate".into()));
    }
    Ok(EigenSplit { s1: plus_inertia.0, s2: minus_inertia.0, plus, minus, plus_inertia, minus_inertia })
}

/// The seven mutually exclusive cases for `m ≡ 0 mod 4`, `r` even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    A,
    B,
    C1,
    C2,
    D1,
    D2,
    D3,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::C1 => "c1",
            Self::C2 => "c2",
            Self::D1 => "d1",
            Self::D2 => "d2",
            Self::D3 => "d3",
        }
    }

    /// Whether the focal variety splits into two components.
    pub fn is_disconnected(self) -> bool {
        matches!(self, Self::A | Self::B)
    }

    pub fn is_d(self) -> bool {
        matches!(self, Self::D1 | Self::D2 | Self::D3)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for CaseLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Signature data the case split depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignatureData {
    pub m: usize,
    pub r: usize,
    pub l: usize,
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
}

impl SignatureData {
    pub fn of<T: Scalar>(sys: &CliffordSystem<T>, split: &EigenSplit<T>) -> Self {
        Self { m: sys.m, r: sys.r, l: sys.l, s: sys.s, s1: split.s1, s2: split.s2 }
    }

    /// The (in)equalities every in-scope system satisfies.
    pub fn check_bounds(&self) -> Result<()> {
        let Self { m, r, l, s, s1, s2 } = *self;
        let fail = |what: String| Err(Error::IdentityViolated(what));
        if m % 4 != 0 || r % 2 != 0 || r > m {
            return Err(Error::InvalidParameters(format!("(m, r) = ({m}, {r}) is out of scope")));
        }
        if s1 + s2 != s {
            return fail(format!("s1 + s2 = {} differs from s = {s}", s1 + s2));
        }
        if r < m && (s % 2 != 0 || s1 != s2) {
            return fail(format!("r < m needs s even and s1 = s2, got s = {s}, ({s1}, {s2})"));
        }
        if r == 0 && s / 2 + m > l {
            return fail(format!("r = 0 needs s/2 ≤ l − m, got s = {s}, l = {l}, m = {m}"));
        }
        if r > 0 && r < m && !(s == l && 2 * (m - r) <= l) {
            return fail(format!("interior r needs m − r ≤ l/2 = s/2, got l = {l}, s = {s}"));
        }
        if r == m {
            if s != l {
                return fail(format!("r = m needs s = l, got s = {s}, l = {l}"));
            }
            let extreme = (s1, s2) == (0, l) || (s1, s2) == (l, 0);
            let middle = m <= s1 && s1 + m <= l && m <= s2 && s2 + m <= l;
            if !extreme && !middle {
                return fail(format!("r = m admits no split (s1, s2) = ({s1}, {s2}) with l = {l}"));
            }
        }
        Ok(())
    }

    /// Checks the bounds, then returns the single matching case.
    pub fn classify(&self) -> Result<CaseLabel> {
        self.check_bounds()?;
        let Self { m, r, l, s, s1, s2 } = *self;
        Ok(if r == 0 {
            if s / 2 + m == l {
                CaseLabel::A
            } else {
                CaseLabel::D1
            }
        } else if r < m {
            if 2 * (m - r) == l {
                CaseLabel::B
            } else {
                CaseLabel::D2
            }
        } else if (s1, s2) == (0, l) {
            CaseLabel::C1
        } else if (s1, s2) == (l, 0) {
            CaseLabel::C2
        } else {
            CaseLabel::D3
        })
    }
}

pub fn classify_case<T: Scalar>(sys: &CliffordSystem<T>) -> Result<CaseLabel> {
    let split = eigensplit(sys)?;
    SignatureData::of(sys, &split).classify()
}

/// Orthogonal projection `(I + εP)/2` onto `E_ε(P)`.
pub fn eigen_component<T: Scalar>(p: &Operator<T>, z: &[T], eps: i8) -> Vec<T> {
    let pz = p.apply(z);
    let half = T::ratio(1, 2);
    z.iter()
        .zip(pz)
        .map(|(a, b)| {
            let s = if eps > 0 { a.clone() + b } else { a.clone() - b };
            s * half.clone()
        })
        .collect()
}

/// Whether `Pz = εz`.
pub fn in_eigenspace<T: Scalar>(p: &Operator<T>, z: &[T], eps: i8, tol: f64) -> bool {
    let pz = p.apply(z);
    pz.iter().zip(z).all(|(a, b)| {
        let d = if eps > 0 { a.clone() - b.clone() } else { a.clone() + b.clone() };
        d.near_zero(tol)
    })
}

/// Gram matrix across the two eigenspaces; zero by construction.
pub fn cross_gram<T: Scalar>(sys: &CliffordSystem<T>, split: &EigenSplit<T>) -> DenseMatrix<T> {
    let g = sys.metric();
    let mut out = DenseMatrix::zeros(split.plus.len(), split.minus.len());
    for (i, u) in split.plus.iter().enumerate() {
        for (j, v) in split.minus.iter().enumerate() {
            out[(i, j)] = inner_unchecked(u, v, &g);
        }
    }
    out
}

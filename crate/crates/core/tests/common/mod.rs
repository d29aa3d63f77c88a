//! Oracles shared by the integration and acceptance tests. None of them
//! calls the library's own evaluation of `F`, `H` or the shape operator.

#![allow(dead_code)]

use std::collections::BTreeMap;

use clifford_forge::construction::{construct_family, lift_to_clifford_system};
use clifford_forge::exact::linalg::solve;
use clifford_forge::{CliffordSystem, DenseMatrix, Rational, Scalar};

pub fn exact_system(m: usize, r: usize, d: usize) -> CliffordSystem<Rational> {
    let (fam, _) = construct_family(m, r).expect("construct");
    lift_to_clifford_system(&fam, d).expect("lift")
}

pub fn real_system(m: usize, r: usize) -> CliffordSystem<f64> {
    exact_system(m, r, 1).to_real()
}

fn dense(sys: &CliffordSystem<f64>, i: usize) -> Vec<Vec<f64>> {
    sys.operators[i].to_dense().to_rows()
}

fn metric_signs(sys: &CliffordSystem<f64>) -> Vec<f64> {
    (0..sys.dim()).map(|i| if i < sys.s { -1.0 } else { 1.0 }).collect()
}

fn ip(g: &[f64], u: &[f64], v: &[f64]) -> f64 {
    g.iter().zip(u).zip(v).map(|((s, a), b)| s * a * b).sum()
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// A quartic polynomial as `monomial (sorted index tuple) -> coefficient`.
#[derive(Debug, Clone, Default)]
pub struct Quartic(BTreeMap<[usize; 4], f64>);

type Quadratic = BTreeMap<[usize; 2], f64>;

fn quadratic_of(mat: &[Vec<f64>], g: &[f64]) -> Quadratic {
    // x ↦ ᵗx G M x
    let mut q = Quadratic::new();
    for (i, row) in mat.iter().enumerate() {
        for (j, a) in row.iter().enumerate() {
            if *a != 0.0 {
                let key = if i <= j { [i, j] } else { [j, i] };
                *q.entry(key).or_insert(0.0) += g[i] * a;
            }
        }
    }
    q
}

fn square(q: &Quadratic, scale: f64, out: &mut Quartic) {
    for (a, ca) in q {
        for (b, cb) in q {
            let mut key = [a[0], a[1], b[0], b[1]];
            key.sort_unstable();
            *out.0.entry(key).or_insert(0.0) += scale * ca * cb;
        }
    }
}

impl Quartic {
    /// `F(x) = ⟨x,x⟩² − 2 Σ_j η_jj ⟨P_j x, x⟩²` expanded into monomials.
    pub fn of_system(sys: &CliffordSystem<f64>) -> Self {
        let g = metric_signs(sys);
        let n = sys.dim();
        let identity: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let mut f = Quartic::default();
        square(&quadratic_of(&identity, &g), 1.0, &mut f);
        for j in 0..sys.m {
            let eta = if j < sys.r { -1.0 } else { 1.0 };
            square(&quadratic_of(&dense(sys, j), &g), -2.0 * eta, &mut f);
        }
        f
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|(k, c)| c * k.iter().map(|&i| x[i]).product::<f64>()).sum()
    }

    /// Euclidean partial derivatives, monomial by monomial.
    pub fn partials(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (k, c) in &self.0 {
            for pos in 0..4 {
                let rest: f64 = (0..4).filter(|&p| p != pos).map(|p| x[k[p]]).product();
                out[k[pos]] += c * rest;
            }
        }
        out
    }
}

/// Sphere-tangent pseudo-gradient of `f` from the monomial expansion.
pub fn symbolic_grad_f(sys: &CliffordSystem<f64>, poly: &Quartic, x: &[f64]) -> Vec<f64> {
    let g = metric_signs(sys);
    let grad: Vec<f64> = poly.partials(x).iter().zip(&g).map(|(p, s)| p * s).collect();
    let along = ip(&g, &grad, x) / ip(&g, x, x);
    grad.iter().zip(x).map(|(a, b)| a - along * b).collect()
}

/// Rows `J x`, `J P_j x` of the constraint differential at `x`.
fn normal_rows(sys: &CliffordSystem<f64>, x: &[f64]) -> Vec<Vec<f64>> {
    let g = metric_signs(sys);
    let mut normals = vec![x.to_vec()];
    normals.extend((0..sys.m).map(|j| sys.apply(j, x)));
    normals.into_iter().map(|v| v.iter().zip(&g).map(|(a, s)| a * s).collect()).collect()
}

/// Euclidean-orthonormal spanning set of `T_x M_+`.
pub fn tangent_basis(sys: &CliffordSystem<f64>, x: &[f64]) -> Vec<Vec<f64>> {
    let rows = normal_rows(sys, x);
    let mut basis: Vec<Vec<f64>> = rows.iter().map(|r| r.clone()).collect();
    orthonormalize(&mut basis);
    let normal_count = basis.len();
    for i in 0..sys.dim() {
        let mut e = vec![0.0; sys.dim()];
        e[i] = 1.0;
        for b in &basis {
            let d: f64 = b.iter().zip(&e).map(|(p, q)| p * q).sum();
            e.iter_mut().zip(b).for_each(|(ei, bi)| *ei -= d * bi);
        }
        let n = euclid(&e);
        if n > 1e-6 {
            basis.push(e.into_iter().map(|v| v / n).collect());
        }
    }
    basis.split_off(normal_count)
}

fn orthonormalize(vs: &mut Vec<Vec<f64>>) {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs.iter() {
        let mut w = v.clone();
        for b in &out {
            let d: f64 = b.iter().zip(&w).map(|(p, q)| p * q).sum();
            w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= d * bi);
        }
        let n = euclid(&w);
        out.push(w.into_iter().map(|v| v / n).collect());
    }
    *vs = out;
}

/// Moves `y` back onto `M_+` along `span{x, P_j x}` (the normal space at the
/// base point `x`) by Newton's method on the `m + 1` constraints.
pub fn project_along_normals(sys: &CliffordSystem<f64>, x: &[f64], y: &[f64]) -> Vec<f64> {
    let g = metric_signs(sys);
    let mut dirs = vec![x.to_vec()];
    dirs.extend((0..sys.m).map(|j| sys.apply(j, x)));
    let k = dirs.len();
    let mut y = y.to_vec();
    for _ in 0..50 {
        let mut c = vec![ip(&g, &y, &y) - 1.0];
        c.extend((0..sys.m).map(|j| ip(&g, &sys.apply(j, &y), &y)));
        if c.iter().all(|v| v.abs() < 1e-15) {
            break;
        }
        let mut grads = vec![y.iter().map(|v| 2.0 * v).collect::<Vec<f64>>()];
        grads.extend((0..sys.m).map(|j| sys.apply(j, &y).iter().map(|v| 2.0 * v).collect()));
        let mut jac = DenseMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                jac[(a, b)] = ip(&g, &grads[a], &dirs[b]);
            }
        }
        let step = solve(&jac, &c, 1e-14).expect("normal directions are independent");
        for (s, d) in step.iter().zip(&dirs) {
            y.iter_mut().zip(d).for_each(|(yi, di)| *yi -= s * di);
        }
    }
    y
}

/// `⟨II(X, X), v⟩` from the second central difference of the curve
/// `t ↦ proj(x + tX)` on `M_+`.
pub fn second_form_fd(sys: &CliffordSystem<f64>, x: &[f64], dir: &[f64], v: &[f64], h: f64) -> f64 {
    let g = metric_signs(sys);
    let at = |t: f64| {
        let y: Vec<f64> = x.iter().zip(dir).map(|(a, b)| a + t * b).collect();
        project_along_normals(sys, x, &y)
    };
    let (p, q) = (at(h), at(-h));
    let acc: Vec<f64> = p.iter().zip(&q).zip(x).map(|((a, b), c)| (a + b - 2.0 * c) / (h * h)).collect();
    ip(&g, &acc, v)
}

/// `⟨II(X, Y), v⟩` by polarization.
pub fn second_form_pair_fd(sys: &CliffordSystem<f64>, x: &[f64], a: &[f64], b: &[f64], v: &[f64], h: f64) -> f64 {
    let plus: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
    let minus: Vec<f64> = a.iter().zip(b).map(|(p, q)| p - q).collect();
    (second_form_fd(sys, x, &plus, v, h) - second_form_fd(sys, x, &minus, v, h)) / 4.0
}

/// Step of the finite-difference shape oracle, relative to the Euclidean
/// norm of the base point (rounding in the second difference grows with it).
pub const FD_STEP: f64 = 1e-4;

/// `max_Y |⟨S_v k, Y⟩|` over a Euclidean-orthonormal tangent basis, for
/// the Euclidean-normalised direction `k`.
pub fn shape_residual_fd(sys: &CliffordSystem<f64>, x: &[f64], v: &[f64], k: &[f64]) -> f64 {
    let n = euclid(k);
    let k: Vec<f64> = k.iter().map(|a| a / n).collect();
    let h = FD_STEP * euclid(x).max(1.0);
    tangent_basis(sys, x)
        .iter()
        .map(|y| second_form_pair_fd(sys, x, &k, y, v, h).abs())
        .fold(0.0, f64::max)
}

/// Same, for an arbitrary tangent `k` (used to check the oracle detects
/// non-kernel directions).
pub fn tangent_component(sys: &CliffordSystem<f64>, x: &[f64], w: &[f64]) -> Vec<f64> {
    let basis = tangent_basis(sys, x);
    let mut out = vec![0.0; w.len()];
    for b in &basis {
        let d: f64 = b.iter().zip(w).map(|(p, q)| p * q).sum();
        out.iter_mut().zip(b).for_each(|(o, bi)| *o += d * bi);
    }
    out
}

pub fn rational_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&a| Rational::ratio(a, 1)).collect()
}

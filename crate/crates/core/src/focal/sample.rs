//! Seeded sampling of `M_+`, of unit normals, and of the level sets `M_c`
//! reached through the normal-exponential map.
//!
//! Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so the
//! output does not depend on how many worker threads run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::CliffordSystem;
use crate::error::{Error, Result};
use crate::exact::linalg::solve;
use crate::exact::metric::norm_f64;
use crate::exact::DenseMatrix;

use super::level::{
    check_level, constraint_values, eval_f, focal_map_phi, focal_map_velocity, m_plus_membership_tol,
    unit_normal_xi, MEMBERSHIP_TOL,
};

pub const MAX_NEWTON_STEPS: usize = 100;
/// Projected points farther than this (Euclidean) from the origin are
/// discarded; they carry too much cancellation for the tolerances.
pub const MAX_SAMPLE_NORM: f64 = 50.0;
const MAX_ATTEMPTS: usize = 1000;

/// Environment variable capping the worker threads used for sampling.
pub const THREADS_ENV: &str = "CLIFFORD_FORGE_THREADS";

/// The RNG for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(n.max(1));
    }
    builder.build().map_err(|e| Error::InvalidParameters(format!("thread pool: {e}")))
}

/// Runs `f(i)` for `i < count` on the sampling pool, in index order.
pub fn par_indexed<U: Send>(count: usize, f: impl Fn(u64) -> Result<U> + Sync + Send) -> Result<Vec<U>> {
    let pool = thread_pool()?;
    pool.install(|| (0..count as u64).into_par_iter().map(f).collect())
}

fn residuals(sys: &CliffordSystem<f64>, x: &[f64]) -> Vec<f64> {
    let mut c = vec![sys.inner(x, x) - 1.0];
    c.extend(constraint_values(sys, x));
    c
}

/// Gauss–Newton projection onto `⟨x,x⟩ = 1`, `⟨P_j x, x⟩ = 0`: minimum
/// Euclidean-norm steps from the constraint Jacobian (rows `2Jx`, `2JP_j x`).
pub fn newton_project(sys: &CliffordSystem<f64>, start: &[f64]) -> Result<Vec<f64>> {
    newton_project_tol(sys, start, MEMBERSHIP_TOL)
}

/// [`newton_project`] accepting a non-converged end point within `tol`.
pub fn newton_project_tol(sys: &CliffordSystem<f64>, start: &[f64], tol: f64) -> Result<Vec<f64>> {
    let g = sys.metric();
    let mut x = start.to_vec();
    for _ in 0..MAX_NEWTON_STEPS {
        let c = residuals(sys, &x);
        if c.iter().all(|v| v.abs() < 1e-14) {
            return Ok(x);
        }
        let mut rows = vec![g.apply(&x)];
        rows.extend(sys.operators.iter().map(|p| g.apply(&p.apply(&x))));
        for row in rows.iter_mut() {
            row.iter_mut().for_each(|v| *v *= 2.0);
        }
        let k = rows.len();
        let mut gram = DenseMatrix::zeros(k, k);
        for a in 0..k {
            for b in 0..k {
                gram[(a, b)] = rows[a].iter().zip(&rows[b]).map(|(p, q)| p * q).sum();
            }
        }
        let lambda = solve(&gram, &c, 1e-14)?;
        for (row, l) in rows.iter().zip(&lambda) {
            for (xi, ri) in x.iter_mut().zip(row) {
                *xi -= l * ri;
            }
        }
        if !x.iter().all(|v| v.is_finite()) {
            break;
        }
    }
    if m_plus_membership_tol(sys, &x, tol) {
        return Ok(x);
    }
    Err(Error::NonConvergence(format!("projection did not converge in {MAX_NEWTON_STEPS} steps")))
}

/// One point of `M_+` drawn with `rng`.
pub fn sample_point(sys: &CliffordSystem<f64>, rng: &mut impl Rng) -> Result<Vec<f64>> {
    sample_point_tol(sys, rng, MEMBERSHIP_TOL)
}

/// [`sample_point`] with an explicit membership tolerance.
pub fn sample_point_tol(sys: &CliffordSystem<f64>, rng: &mut impl Rng, tol: f64) -> Result<Vec<f64>> {
    for _ in 0..MAX_ATTEMPTS {
        let mut x: Vec<f64> = (0..sys.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let n = sys.inner(&x, &x);
        if n > 0.0 {
            let s = n.sqrt();
            x.iter_mut().for_each(|v| *v /= s);
        }
        let Ok(p) = newton_project_tol(sys, &x, tol) else { continue };
        if norm_f64(&p) <= MAX_SAMPLE_NORM && m_plus_membership_tol(sys, &p, tol) {
            return Ok(p);
        }
    }
    Err(Error::NonConvergence(format!("no sample accepted after {MAX_ATTEMPTS} attempts")))
}

/// `count` points of `M_+`, deterministic in `seed`.
pub fn sample_m_plus(sys: &CliffordSystem<f64>, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    par_indexed(count, |i| sample_point(sys, &mut sample_rng(seed, i)))
}

/// A random normal `v = Σ a_i P_i x` at `x ∈ M_+` with `⟨v,v⟩ = δ`.
pub fn sample_normal(sys: &CliffordSystem<f64>, x: &[f64], delta: i8, rng: &mut impl Rng) -> Result<Vec<f64>> {
    let eta = sys.eta();
    let possible = if delta > 0 { sys.r < sys.m } else { sys.r > 0 };
    if !possible {
        return Err(Error::Precondition(format!(
            "no normal with ⟨v,v⟩ = {delta} when r = {} and m = {}",
            sys.r, sys.m
        )));
    }
    loop {
        let a: Vec<f64> = (0..sys.m).map(|_| rng.sample(StandardNormal)).collect();
        let n: f64 = a.iter().enumerate().map(|(i, ai)| eta.sign(i) as f64 * ai * ai).sum();
        if n * delta as f64 <= 1e-3 {
            continue;
        }
        let s = n.abs().sqrt();
        let mut v = vec![0.0; sys.dim()];
        for (i, ai) in a.iter().enumerate() {
            for (vj, pj) in v.iter_mut().zip(sys.apply(i, x)) {
                *vj += ai / s * pj;
            }
        }
        return Ok(v);
    }
}

/// Residuals of one pushed-forward sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelResidual {
    /// `|f(φ(x, v)) − c|`.
    pub f: f64,
    /// Euclidean norm of `γ′(t_c) + ξ` at the image point.
    pub normal: f64,
}

/// Summary of a level-set run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub c: f64,
    pub delta: i8,
    pub count: usize,
    pub seed: u64,
    pub max_f_residual: f64,
    pub max_normal_residual: f64,
    pub residuals: Vec<LevelResidual>,
}

/// Samples `M_+`, draws a normal of the type fixed by `c`, maps it to `M_c`
/// and measures `f − c` and `γ′ + ξ` there.
pub fn sample_level_set(sys: &CliffordSystem<f64>, c: f64, count: usize, seed: u64) -> Result<LevelSetReport> {
    sample_level_set_tol(sys, c, count, seed, MEMBERSHIP_TOL)
}

/// [`sample_level_set`] with an explicit membership tolerance for the
/// points of `M_+`.
pub fn sample_level_set_tol(
    sys: &CliffordSystem<f64>,
    c: f64,
    count: usize,
    seed: u64,
    membership_tol: f64,
) -> Result<LevelSetReport> {
    let delta = check_level(sys, c)?;
    let residuals = par_indexed(count, |i| {
        let mut rng = sample_rng(seed, i);
        let x = sample_point_tol(sys, &mut rng, membership_tol)?;
        let v = sample_normal(sys, &x, delta, &mut rng)?;
        let y = focal_map_phi(sys, &x, &v, c)?;
        let vel = focal_map_velocity(sys, &x, &v, c)?;
        let xi = unit_normal_xi(sys, &y, c)?;
        let diff: Vec<f64> = vel.iter().zip(&xi).map(|(a, b)| a + b).collect();
        Ok(LevelResidual { f: (eval_f(sys, &y)? - c).abs(), normal: norm_f64(&diff) })
    })?;
    Ok(LevelSetReport {
        c,
        delta,
        count,
        seed,
        max_f_residual: residuals.iter().map(|r| r.f).fold(0.0, f64::max),
        max_normal_residual: residuals.iter().map(|r| r.normal).fold(0.0, f64::max),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_family, lift_to_clifford_system};
    use crate::focal::level::eval_f;

    fn system(m: usize, r: usize) -> CliffordSystem<f64> {
        let (fam, _) = construct_family(m, r).unwrap();
        lift_to_clifford_system(&fam, 1).unwrap()
    }

    #[test]
    fn samples_are_on_the_variety_and_reproducible() {
        let sys = system(4, 0);
        let a = sample_m_plus(&sys, 12, 7).unwrap();
        let b = sample_m_plus(&sys, 12, 7).unwrap();
        assert_eq!(a, b);
        for x in &a {
            assert!(m_plus_membership_tol(&sys, x, MEMBERSHIP_TOL));
            assert!((eval_f(&sys, x).unwrap() - 1.0).abs() < 1e-9);
        }
        assert_ne!(a, sample_m_plus(&sys, 12, 8).unwrap());
    }

    #[test]
    fn normals_have_the_requested_type() {
        let sys = system(4, 2);
        let x = sample_m_plus(&sys, 1, 3).unwrap().remove(0);
        let mut rng = sample_rng(3, 99);
        for delta in [1i8, -1] {
            let v = sample_normal(&sys, &x, delta, &mut rng).unwrap();
            assert!((sys.inner(&v, &v) - delta as f64).abs() < 1e-9);
        }
        let riemannian = system(4, 0);
        let x = sample_m_plus(&riemannian, 1, 3).unwrap().remove(0);
        assert!(sample_normal(&riemannian, &x, -1, &mut rng).is_err());
    }

    #[test]
    fn level_sets_of_both_types() {
        let zero = sample_level_set(&system(4, 0), 0.0, 10, 1).unwrap();
        assert!(zero.max_f_residual < 1e-9);
        assert!(zero.max_normal_residual < 1e-8);
        let c = 4f64.cosh();
        let hyper = sample_level_set(&system(4, 4), c, 10, 1).unwrap();
        assert!(hyper.max_f_residual < 1e-9 * c);
        assert!(hyper.max_normal_residual < 1e-8);
        assert!(matches!(sample_level_set(&system(4, 0), 2.0, 1, 1), Err(Error::OutsideRegularRange { .. })));
    }
}

//! The two worked examples on `ℝ^16_8`: the `(4, 0)` system, whose focal
//! variety has two components, and the connected `(4, 4)` one, together with
//! the explicit chart of `M_{+,1}` for the first.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::{verify_system, CliffordSystem};
use crate::construction::{construct_family, lift_to_clifford_system, ConstructionTrace};
use crate::error::{Error, Result};
use crate::exact::linalg::inverse;
use crate::exact::metric::{inner_unchecked, norm_f64};
use crate::exact::{gram_matrix, DenseMatrix, Metric, Rational, Scalar, ScaledVector};
use crate::focal::eigen::{eigen_component, eigensplit, CaseLabel, SignatureData};
use crate::focal::level::{w_rn_interval, RegularRange};
use crate::focal::report::connectedness_census;
use crate::focal::sample::sample_m_plus;
use crate::focal::strata::{components_of, stratum_of, StratumLabel};

/// Names accepted by [`example`].
pub const EXAMPLE_NAMES: [&str; 2] = ["m4r0", "m4r4"];

/// What each example is known to satisfy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Expected {
    pub case: CaseLabel,
    pub w_rn: RegularRange,
    pub component_count: usize,
    pub diffeo_target: &'static str,
}

/// A system with printed bases of `E_±(P)`: integer vectors that become
/// pseudo-orthonormal after multiplying by `√basis_scale_sq`.
#[derive(Debug, Clone)]
pub struct ExampleBundle {
    pub name: &'static str,
    pub system: CliffordSystem<Rational>,
    pub trace: ConstructionTrace,
    pub a_basis: Vec<Vec<Rational>>,
    pub b_basis: Vec<Vec<Rational>>,
    pub basis_scale_sq: Rational,
    pub expected: Expected,
}

fn pair_vector(n: usize, i: usize, j: usize, sign: i64) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i - 1] = Rational::one();
    v[j - 1] = Rational::ratio(sign, 1);
    v
}

/// Index pairs and signs of `a_1, …, a_8` (1-based); `b_j` uses the opposite
/// sign.
const FOUR_ZERO_PAIRS: [(usize, usize, i64); 8] =
    [(1, 8, 1), (2, 7, 1), (3, 6, -1), (4, 5, -1), (9, 16, 1), (10, 15, 1), (11, 14, -1), (12, 13, -1)];

fn built(m: usize, r: usize) -> Result<(CliffordSystem<Rational>, ConstructionTrace)> {
    let (fam, trace) = construct_family(m, r)?;
    Ok((lift_to_clifford_system(&fam, 1)?, trace))
}

/// The `(4, 0)` system on `ℝ^16_8` with its printed eigenbases.
pub fn example_four_zero() -> Result<ExampleBundle> {
    let (system, trace) = built(4, 0)?;
    let n = system.dim();
    Ok(ExampleBundle {
        name: "m4r0",
        a_basis: FOUR_ZERO_PAIRS.iter().map(|&(i, j, s)| pair_vector(n, i, j, s)).collect(),
        b_basis: FOUR_ZERO_PAIRS.iter().map(|&(i, j, s)| pair_vector(n, i, j, -s)).collect(),
        system,
        trace,
        basis_scale_sq: Rational::ratio(1, 2),
        expected: Expected {
            case: CaseLabel::A,
            w_rn: RegularRange::Inner,
            component_count: 2,
            diffeo_target: "S^7_4 x (S^4_4)_+ x S^3_0",
        },
    })
}

/// The `(4, 4)` system on `ℝ^16_8`; its eigenbases are the pair vectors of
/// the signed permutation `P`, timelike ones first.
pub fn example_four_four() -> Result<ExampleBundle> {
    let (system, trace) = built(4, 4)?;
    let p = system.full_product();
    let perm = p.as_perm().ok_or_else(|| Error::Construction("P is not a signed permutation".into()))?;
    let (mut plus, mut minus) = perm.involution_eigenbasis::<Rational>()?;
    let g = system.metric();
    for side in [&mut plus, &mut minus] {
        if side.iter().any(|v| v.iter().filter(|c| !c.is_zero()).count() != 2) {
            return Err(Error::Construction("P has a fixed coordinate".into()));
        }
        side.sort_by_key(|v| inner_unchecked(v, v, &g) > Rational::zero());
    }
    Ok(ExampleBundle {
        name: "m4r4",
        system,
        trace,
        a_basis: plus,
        b_basis: minus,
        basis_scale_sq: Rational::ratio(1, 2),
        expected: Expected {
            case: CaseLabel::D3,
            w_rn: RegularRange::Outer,
            component_count: 1,
            diffeo_target: "S^7_4 x S^4_0 x H^3_3",
        },
    })
}

pub fn example(name: &str) -> Result<ExampleBundle> {
    match name {
        "m4r0" => example_four_zero(),
        "m4r4" => example_four_four(),
        other => Err(Error::InvalidParameters(format!(
            "unknown example {other:?}; expected one of {}",
            EXAMPLE_NAMES.join(", ")
        ))),
    }
}

impl ExampleBundle {
    /// Scaled Gram matrix of a basis.
    pub fn scaled_gram(&self, basis: &[Vec<Rational>]) -> DenseMatrix<Rational> {
        gram_matrix(basis, &self.system.metric()).scale(&self.basis_scale_sq)
    }

    /// `⟨a_i, a_i⟩ ∈ {±1}` after scaling.
    fn a_signs(&self) -> Vec<Rational> {
        let g = self.scaled_gram(&self.a_basis);
        (0..self.a_basis.len()).map(|i| g[(i, i)].clone()).collect()
    }

    /// `√2 · c(z)`: coefficients of `z_+` in the normalised `a`-basis, up to
    /// the common factor `1/√2`.
    pub fn scaled_coefficients<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        let g = self.system.metric();
        self.a_basis
            .iter()
            .zip(self.a_signs())
            .map(|(a, e)| {
                let a: Vec<T> = a.iter().map(|x| T::ratio(x.to_i64().unwrap_or(0), 1)).collect();
                let v = inner_unchecked(z, &a, &g);
                if e.is_one() {
                    v
                } else {
                    -v
                }
            })
            .collect()
    }
}

/// `A(c) = M_1(c)^{-1} M_2(c)` with the two printed `4 × 4` matrices.
/// Homogeneous of degree 0 in `c`.
pub fn a_matrix<T: Scalar>(c: &[T]) -> Result<DenseMatrix<T>> {
    if c.len() != 8 {
        return Err(Error::DimensionMismatch { expected: 8, found: c.len() });
    }
    let k = |i: usize| c[i - 1].clone();
    let n = |i: usize| -c[i - 1].clone();
    let m1 = DenseMatrix::from_rows(vec![
        vec![k(7), n(8), n(5), k(6)],
        vec![n(6), k(5), n(8), k(7)],
        vec![k(5), k(6), k(7), k(8)],
        vec![n(8), n(7), k(6), k(5)],
    ])?;
    let m2 = DenseMatrix::from_rows(vec![
        vec![n(3), k(4), k(1), n(2)],
        vec![k(2), n(1), k(4), n(3)],
        vec![n(1), n(2), n(3), n(4)],
        vec![k(4), k(3), n(2), n(1)],
    ])?;
    let inv = inverse(&m1, T::default_tol())
        .map_err(|_| Error::Singular("the 4x4 matrix M_1(c) is singular at this point".into()))?;
    inv.mul(&m2)
}

/// Image of one point under the chart, with its residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffeoImage {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `q_1(c), …, q_4(c)`.
    pub q: Vec<Vec<f64>>,
    /// `|⟨x,x⟩ − 1|` in `ℝ^8_4`.
    pub x_residual: f64,
    /// `|⟨y,y⟩ − 1|` in `ℝ^5_4`.
    pub y_residual: f64,
    /// `max |⟨q_i, q_j⟩ + δ_ij|`.
    pub frame_residual: f64,
    /// `max |P q_i + q_i|`.
    pub eigen_residual: f64,
    /// `max |⟨P_k z_+, q_i⟩|`.
    pub slot_residual: f64,
}

fn chart(bundle: &ExampleBundle, z: &[f64], a: &DenseMatrix<f64>) -> Result<DiffeoImage> {
    let sys = bundle.system.to_real();
    let g = sys.metric();
    let p = sys.full_product();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let c: Vec<f64> = bundle.scaled_coefficients(z).iter().map(|v| v * inv_sqrt2).collect();
    let b: Vec<Vec<f64>> =
        bundle.b_basis.iter().map(|v| v.iter().map(|x| x.to_f64_lossy() * inv_sqrt2).collect()).collect();
    let mut q = Vec::with_capacity(4);
    for i in 0..4 {
        let col: f64 = (0..4).map(|j| a[(j, i)] * a[(j, i)]).sum();
        if col >= 1.0 {
            return Err(Error::Singular(format!("1 − Σ_j (A^j_{})² = {} is not positive", i + 1, 1.0 - col)));
        }
        let s = 1.0 / (1.0 - col).sqrt();
        let mut v = b[i].clone();
        for j in 0..4 {
            for (vk, bk) in v.iter_mut().zip(&b[4 + j]) {
                *vk -= a[(j, i)] * bk;
            }
        }
        q.push(v.into_iter().map(|x| x * s).collect::<Vec<f64>>());
    }
    let y5_sq: f64 = -c[..4].iter().map(|v| v * v).sum::<f64>() + c[4..].iter().map(|v| v * v).sum::<f64>();
    if y5_sq <= 0.0 {
        return Err(Error::Precondition("point has ⟨z_+, z_+⟩ ≤ 0".into()));
    }
    let y5 = y5_sq.sqrt();
    let zm = eigen_component(&p, z, -1);
    let zp = eigen_component(&p, z, 1);
    let x: Vec<f64> = c.iter().map(|v| v / y5).collect();
    let mut y: Vec<f64> = q.iter().map(|qj| -inner_unchecked(&zm, qj, &g)).collect();
    y.push(y5);
    let x_residual = (inner_unchecked(&x, &x, &Metric::new(4, 4)) - 1.0).abs();
    let y_residual = (inner_unchecked(&y, &y, &Metric::new(4, 1)) - 1.0).abs();
    let mut frame_residual: f64 = 0.0;
    let mut eigen_residual: f64 = 0.0;
    let mut slot_residual: f64 = 0.0;
    for (i, qi) in q.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            let target = if i == j { -1.0 } else { 0.0 };
            frame_residual = frame_residual.max((inner_unchecked(qi, qj, &g) - target).abs());
        }
        let pq: Vec<f64> = p.apply(qi).iter().zip(qi).map(|(a, b)| a + b).collect();
        eigen_residual = eigen_residual.max(pq.iter().fold(0.0, |m, v| m.max(v.abs())));
        for k in 0..sys.m {
            slot_residual = slot_residual.max(inner_unchecked(&sys.apply(k, &zp), qi, &g).abs());
        }
    }
    Ok(DiffeoImage { x, y, q, x_residual, y_residual, frame_residual, eigen_residual, slot_residual })
}

fn check_m_plus_one(bundle: &ExampleBundle, z: &[f64]) -> Result<()> {
    if bundle.name != "m4r0" {
        return Err(Error::Precondition("the chart is defined for the (4, 0) example only".into()));
    }
    match stratum_of(&bundle.system.to_real(), z)? {
        StratumLabel::One => Ok(()),
        other => Err(Error::Precondition(format!("point lies in {other}, not M+,1"))),
    }
}

/// `z ↦ (x(z), y(z)) ∈ S^7_4 × (S^4_4)_+` for `z ∈ M_{+,1}`.
pub fn diffeo_forward(bundle: &ExampleBundle, z: &[f64]) -> Result<DiffeoImage> {
    check_m_plus_one(bundle, z)?;
    let c = bundle.scaled_coefficients(z);
    chart(bundle, z, &a_matrix(&c)?)
}

/// Same chart for an exact point; `A(c)` is computed in exact arithmetic.
pub fn diffeo_forward_exact(bundle: &ExampleBundle, z: &ScaledVector<Rational>) -> Result<DiffeoImage> {
    let real = z.to_f64();
    check_m_plus_one(bundle, &real)?;
    let a = a_matrix(&bundle.scaled_coefficients(&z.coords))?;
    chart(bundle, &real, &a.to_f64())
}

/// The chart extended to `M_+`: points of `M_{+,2}` are moved to `M_{+,1}`
/// by `P_4` and land in `(S^4_4)_-` (the sign of `y^5` flipped).
pub fn diffeo_forward_extended(bundle: &ExampleBundle, z: &[f64]) -> Result<DiffeoImage> {
    let sys = bundle.system.to_real();
    match stratum_of(&sys, z)? {
        StratumLabel::One => diffeo_forward(bundle, z),
        StratumLabel::Two => {
            let moved = sys.apply(3, z);
            let mut image = diffeo_forward(bundle, &moved)?;
            if let Some(last) = image.y.last_mut() {
                *last = -*last;
            }
            Ok(image)
        }
        StratumLabel::Three => Err(Error::Precondition("M+,3 is empty for this example".into())),
    }
}

/// Pairwise comparison of chart images.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub samples: usize,
    pub singular: usize,
    pub pairs_compared: usize,
    pub collisions: usize,
    pub min_image_distance: f64,
}

/// Images of distinct inputs (distance > 1e−4) must stay apart (> 1e−8).
/// A statistical check only.
pub fn diffeo_injectivity_probe(bundle: &ExampleBundle, samples: &[Vec<f64>]) -> Result<ProbeReport> {
    if samples.len() < 2 {
        return Err(Error::Precondition("the probe needs at least two samples".into()));
    }
    let mut images = Vec::new();
    let mut singular = 0;
    for z in samples {
        match diffeo_forward_extended(bundle, z) {
            Ok(img) => images.push((z, [img.x, img.y].concat())),
            Err(Error::Singular(_)) => singular += 1,
            Err(e) => return Err(e),
        }
    }
    let dist = |a: &[f64], b: &[f64]| norm_f64(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>());
    let (mut pairs, mut collisions, mut min_d) = (0, 0, f64::INFINITY);
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if dist(images[i].0, images[j].0) <= 1e-4 {
                continue;
            }
            pairs += 1;
            let d = dist(&images[i].1, &images[j].1);
            min_d = min_d.min(d);
            if d <= 1e-8 {
                collisions += 1;
            }
        }
    }
    Ok(ProbeReport { samples: samples.len(), singular, pairs_compared: pairs, collisions, min_image_distance: min_d })
}

/// Checks of one example run.
#[derive(Debug, Clone)]
pub struct ExampleReport {
    pub name: &'static str,
    pub checks: BTreeMap<&'static str, bool>,
    pub details: Value,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&b| b)
    }

    pub fn to_json(&self) -> Value {
        json!({ "example": self.name, "checks": self.checks, "details": self.details, "passed": self.passed() })
    }
}

fn is_signed_identity(g: &DenseMatrix<Rational>, signs: &[i64]) -> bool {
    (0..g.rows()).all(|i| (0..g.cols()).all(|j| g[(i, j)] == Rational::ratio(if i == j { signs[i] } else { 0 }, 1)))
}

/// Runs every stated property of the bundle, sampling `count` points with
/// `seed` for the numeric ones.
pub fn run_example(bundle: &ExampleBundle, count: usize, seed: u64) -> Result<ExampleReport> {
    let sys = &bundle.system;
    let mut checks = BTreeMap::new();
    let mut details = serde_json::Map::new();

    let replayed = lift_to_clifford_system::<Rational>(&bundle.trace.replay()?, 1)?;
    checks.insert("provenance_replay", &replayed == sys);
    checks.insert("relations", verify_system(sys, seed).passed);

    let p = sys.full_product();
    let eigen = |basis: &[Vec<Rational>], eps: i64| {
        basis.iter().all(|v| {
            let pv = p.apply(v);
            pv.iter().zip(v).all(|(a, b)| *a == b * Rational::ratio(eps, 1))
        })
    };
    checks.insert("a_basis_in_e_plus", eigen(&bundle.a_basis, 1));
    checks.insert("b_basis_in_e_minus", eigen(&bundle.b_basis, -1));
    let signs = [-1, -1, -1, -1, 1, 1, 1, 1];
    checks.insert("a_basis_gram", is_signed_identity(&bundle.scaled_gram(&bundle.a_basis), &signs));
    checks.insert("b_basis_gram", is_signed_identity(&bundle.scaled_gram(&bundle.b_basis), &signs));

    let split = eigensplit(sys)?;
    let case = SignatureData::of(sys, &split).classify()?;
    checks.insert("eigensplit_signature", (split.s1, split.s2) == (4, 4));
    checks.insert("case", case == bundle.expected.case);
    checks.insert("w_rn", w_rn_interval(sys) == bundle.expected.w_rn);
    checks.insert("component_count", components_of(case).len() == bundle.expected.component_count);
    details.insert("case".into(), json!(case));
    details.insert("s1_s2".into(), json!([split.s1, split.s2]));
    details.insert("w_rn".into(), json!(w_rn_interval(sys)));
    details.insert("diffeo_target".into(), json!(bundle.expected.diffeo_target));

    let real = sys.to_real();
    let samples = sample_m_plus(&real, count, seed)?;
    let strata: Vec<StratumLabel> = samples.iter().map(|z| stratum_of(&real, z)).collect::<Result<_>>()?;
    let count_of = |l: StratumLabel| strata.iter().filter(|&&s| s == l).count();
    details.insert(
        "sample_strata".into(),
        json!({ "M+,1": count_of(StratumLabel::One), "M+,2": count_of(StratumLabel::Two), "M+,3": count_of(StratumLabel::Three) }),
    );

    if bundle.name == "m4r0" {
        let p4 = &real.operators[3];
        let h_ok = samples
            .iter()
            .zip(&strata)
            .filter(|(_, s)| **s == StratumLabel::One)
            .all(|(z, _)| stratum_of(&real, &p4.apply(z)).map(|s| s == StratumLabel::Two).unwrap_or(false));
        checks.insert("p4_maps_m_plus_1_to_m_plus_2", h_ok);
        checks.insert("no_m_plus_3_samples", count_of(StratumLabel::Three) == 0);
        let mut worst = [0.0f64; 5];
        let mut singular = 0;
        let mut y5_ok = true;
        for (z, s) in samples.iter().zip(&strata) {
            match diffeo_forward_extended(bundle, z) {
                Ok(img) => {
                    for (w, r) in worst.iter_mut().zip([
                        img.x_residual,
                        img.y_residual,
                        img.frame_residual,
                        img.eigen_residual,
                        img.slot_residual,
                    ]) {
                        *w = w.max(r);
                    }
                    let y5 = img.y[4];
                    y5_ok &= if *s == StratumLabel::One { y5 >= 1.0 - 1e-9 } else { y5 <= -1.0 + 1e-9 };
                }
                Err(Error::Singular(_)) => singular += 1,
                Err(e) => return Err(e),
            }
        }
        checks.insert("target_spheres", worst[0] < 1e-9 && worst[1] < 1e-9);
        checks.insert("q_frame", worst[2] < 1e-9 && worst[3] < 1e-9 && worst[4] < 1e-9);
        checks.insert("y5_sign_matches_stratum", y5_ok);
        let probe = diffeo_injectivity_probe(bundle, &samples)?;
        checks.insert("injectivity_probe", probe.collisions == 0);
        details.insert(
            "diffeo".into(),
            json!({
                "max_x_residual": worst[0],
                "max_y_residual": worst[1],
                "max_frame_residual": worst[2],
                "max_eigen_residual": worst[3],
                "max_slot_residual": worst[4],
                "singular_samples": singular,
                "probe": probe,
            }),
        );
    } else {
        // Random samples almost never reach M+,1 or M+,2, so the census
        // witnesses are checked alongside them.
        let census = connectedness_census(sys)?;
        let mut points: Vec<(Vec<f64>, StratumLabel)> =
            samples.iter().cloned().zip(strata.iter().copied()).collect();
        for entry in &census.strata {
            if let Some(w) = &entry.witness_point {
                let z = w.to_f64();
                let label = stratum_of(&real, &z)?;
                points.push((z, label));
            }
        }
        let full = real.full_product();
        let in_side = |z: &[f64], eps: f64| full.apply(z).iter().zip(z).all(|(a, b)| (a - eps * b).abs() < 1e-9);
        let eigen_ok = |eps: f64, label: StratumLabel| {
            let hits: Vec<_> = points.iter().filter(|(_, s)| *s == label).collect();
            !hits.is_empty() && hits.iter().all(|(z, _)| in_side(z, eps))
        };
        checks.insert("m_plus_1_is_e_plus", eigen_ok(1.0, StratumLabel::One));
        checks.insert("m_plus_2_is_e_minus", eigen_ok(-1.0, StratumLabel::Two));
        checks.insert(
            "mixed_points_in_m_plus_3",
            points.iter().all(|(z, s)| in_side(z, 1.0) || in_side(z, -1.0) || *s == StratumLabel::Three),
        );
    }
    Ok(ExampleReport { name: bundle.name, checks, details: Value::Object(details) })
}

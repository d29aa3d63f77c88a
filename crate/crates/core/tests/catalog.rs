mod common;

use clifford_forge::catalog::{
    a_matrix, diffeo_forward, diffeo_forward_exact, diffeo_forward_extended, diffeo_injectivity_probe,
    example_four_four, example_four_zero,
};
use clifford_forge::focal::report::connectedness_census;
use clifford_forge::focal::sample::sample_m_plus;
use clifford_forge::focal::strata::{stratum_of, StratumLabel};
use clifford_forge::{Error, Rational, Scalar};

fn normalised(basis: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    basis.iter().map(|v| v.iter().map(|x| x.to_f64_lossy() * s).collect()).collect()
}

/// Rebuilds `z = Σ c^i a_i + Σ y^j q_j(c)` from the chart image.
#[test]
fn chart_inverts_on_samples() {
    let bundle = example_four_zero().unwrap();
    let sys = bundle.system.to_real();
    let a = normalised(&bundle.a_basis);
    let samples = sample_m_plus(&sys, 60, 31).unwrap();
    let mut checked = 0;
    for z in samples.iter().filter(|z| stratum_of(&sys, z).unwrap() == StratumLabel::One) {
        let img = diffeo_forward(&bundle, z).unwrap();
        let y5 = img.y[4];
        let mut rebuilt = vec![0.0; z.len()];
        for (xi, ai) in img.x.iter().zip(&a) {
            rebuilt.iter_mut().zip(ai).for_each(|(r, v)| *r += xi * y5 * v);
        }
        for (yj, qj) in img.y.iter().zip(&img.q) {
            rebuilt.iter_mut().zip(qj).for_each(|(r, v)| *r += yj * v);
        }
        let err = rebuilt.iter().zip(z).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "reconstruction error {err:e}");
        assert!(y5 >= 1.0 - 1e-12);
        checked += 1;
    }
    assert!(checked > 10);
}

#[test]
fn second_component_maps_to_the_lower_sheet() {
    let bundle = example_four_zero().unwrap();
    let sys = bundle.system.to_real();
    let samples = sample_m_plus(&sys, 40, 32).unwrap();
    let mut lower = 0;
    for z in &samples {
        let img = diffeo_forward_extended(&bundle, z).unwrap();
        match stratum_of(&sys, z).unwrap() {
            StratumLabel::Two => {
                assert!(img.y[4] <= -1.0 + 1e-12);
                assert!(matches!(diffeo_forward(&bundle, z), Err(Error::Precondition(_))));
                lower += 1;
            }
            StratumLabel::One => assert!(img.y[4] >= 1.0 - 1e-12),
            StratumLabel::Three => panic!("case a has no third stratum"),
        }
    }
    assert!(lower > 5);
    let probe = diffeo_injectivity_probe(&bundle, &samples).unwrap();
    assert_eq!(probe.collisions, 0);
    assert_eq!(probe.pairs_compared, 40 * 39 / 2);
}

#[test]
fn exact_and_float_charts_agree() {
    let bundle = example_four_zero().unwrap();
    let census = connectedness_census(&bundle.system).unwrap();
    let point = census.strata[0].witness_point.clone().unwrap();
    match diffeo_forward_exact(&bundle, &point) {
        Ok(exact) => {
            let float = diffeo_forward(&bundle, &point.to_f64()).unwrap();
            for (a, b) in exact.x.iter().chain(&exact.y).zip(float.x.iter().chain(&float.y)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        // A coordinate eigenvector may sit on the locus where M_1(c) drops rank.
        Err(Error::Singular(_)) => assert!(matches!(diffeo_forward(&bundle, &point.to_f64()), Err(Error::Singular(_)))),
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn a_matrix_matches_the_float_evaluation() {
    let c: Vec<Rational> = [3, -1, 2, 5, 7, 1, -4, 2].iter().map(|&v| Rational::ratio(v, 2)).collect();
    let exact = a_matrix(&c).unwrap().to_f64();
    let float = a_matrix(&c.iter().map(Scalar::to_f64_lossy).collect::<Vec<_>>()).unwrap();
    assert!(exact.max_abs_diff(&float) < 1e-12);
}

#[test]
fn second_example_refuses_the_chart() {
    let bundle = example_four_four().unwrap();
    let sys = bundle.system.to_real();
    let z = sample_m_plus(&sys, 1, 1).unwrap().remove(0);
    assert!(matches!(diffeo_forward(&bundle, &z), Err(Error::Precondition(_))));
    let signs: Vec<i64> = bundle.scaled_gram(&bundle.a_basis).to_rows().iter().enumerate().map(|(i, r)| {
        r[i].to_f64_lossy() as i64
    }).collect();
    assert_eq!(signs, vec![-1, -1, -1, -1, 1, 1, 1, 1]);
}

use crate::error::{Error, Result};
use crate::exact::metric::inner_unchecked;
use crate::exact::{gram_matrix, signature_of_gram, Metric, Rational, ScaledVector, Scalar};

/// Pseudo-orthogonal (unnormalised) basis of the span, with each vector's
/// self-inner product.
///
/// A null current vector is swapped with the later vector of largest
/// `|⟨u,u⟩|` after projection; if all remaining vectors are null, the current
/// one is replaced by `u_k + u_j` for some `j` with `⟨u_k, u_j⟩ ≠ 0`.
pub fn orthogonalize<T: Scalar>(vectors: &[Vec<T>], g: &Metric) -> Result<Vec<(Vec<T>, T)>> {
    if vectors.iter().any(|v| v.len() != g.dim()) {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: vectors[0].len() });
    }
    let (_, zero, _) = signature_of_gram(&gram_matrix(vectors, g))?;
    if zero > 0 {
        return Err(Error::DegenerateSpan(format!(
            "Gram matrix of {} vectors has {zero} zero eigenvalue(s)",
            vectors.len()
        )));
    }
    let tol = T::default_tol();
    let mut rest: Vec<Vec<T>> = vectors.to_vec();
    let mut out: Vec<(Vec<T>, T)> = Vec::new();
    while !rest.is_empty() {
        let norms: Vec<T> = rest.iter().map(|u| inner_unchecked(u, u, g)).collect();
        if norms[0].near_zero(tol) {
            let best = (1..rest.len())
                .filter(|&j| !norms[j].near_zero(tol))
                .max_by(|&i, &j| norms[i].to_f64_lossy().abs().total_cmp(&norms[j].to_f64_lossy().abs()));
            match best {
                Some(j) => rest.swap(0, j),
                None => {
                    let partner = (1..rest.len())
                        .find(|&j| !inner_unchecked(&rest[0], &rest[j], g).near_zero(tol))
                        .ok_or_else(|| {
                            Error::DegenerateSpan("remaining vectors are mutually orthogonal and null".into())
                        })?;
                    let sum: Vec<T> =
                        rest[0].iter().zip(&rest[partner]).map(|(a, b)| a.clone() + b.clone()).collect();
                    rest[0] = sum;
                }
            }
        }
        let w = rest.remove(0);
        let ww = inner_unchecked(&w, &w, g);
        if ww.near_zero(tol) {
            return Err(Error::DegenerateSpan("no admissible pivot".into()));
        }
        for u in rest.iter_mut() {
            let c = inner_unchecked(u, &w, g) / ww.clone();
            if c.is_zero() {
                continue;
            }
            for (ui, wi) in u.iter_mut().zip(&w) {
                *ui = ui.clone() - c.clone() * wi.clone();
            }
        }
        out.push((w, ww));
    }
    Ok(out)
}

/// Generalized Gram–Schmidt in floating point: `⟨w_i, w_j⟩ = ±δ_ij`.
pub fn gram_schmidt_pseudo(vectors: &[Vec<f64>], g: &Metric) -> Result<Vec<Vec<f64>>> {
    Ok(orthogonalize(vectors, g)?
        .into_iter()
        .map(|(w, n)| {
            let s = n.abs().sqrt();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect())
}

/// Exact variant: each output carries `scale_sq = 1 / |⟨w, w⟩|`, so the
/// scaled vectors are pseudo-orthonormal.
pub fn gram_schmidt_pseudo_exact(vectors: &[Vec<Rational>], g: &Metric) -> Result<Vec<ScaledVector<Rational>>> {
    Ok(orthogonalize(vectors, g)?
        .into_iter()
        .map(|(w, n)| {
            let scale = Rational::from_integer(1.into()) / num_traits::Signed::abs(&n);
            ScaledVector::new(w, scale)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::metric::unit;
    use proptest::prelude::*;

    #[test]
    fn orthonormal_input_is_unchanged() {
        let g = Metric::new(1, 2);
        let vs: Vec<Vec<f64>> = (0..3).map(|i| unit(3, i)).collect();
        assert_eq!(gram_schmidt_pseudo(&vs, &g).unwrap(), vs);
    }

    #[test]
    fn proportional_vectors_are_degenerate() {
        let g = Metric::euclidean(2);
        let vs = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(matches!(gram_schmidt_pseudo(&vs, &g), Err(Error::DegenerateSpan(_))));
    }

    #[test]
    fn null_vectors_are_combined() {
        let g = Metric::new(1, 1);
        let q = |n| Rational::ratio(n, 1);
        let vs = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let out = gram_schmidt_pseudo_exact(&vs, &g).unwrap();
        let a = &out[0];
        let b = &out[1];
        let ab = inner_unchecked(&a.coords, &b.coords, &g);
        assert_eq!(ab, q(0));
        let signs = [a.self_inner(&g), b.self_inner(&g)];
        assert!(signs.contains(&q(1)) && signs.contains(&q(-1)));
    }

    proptest! {
        #[test]
        fn exact_output_gram_is_diagonal_sign(
            raw in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 4), 3),
            neg in 0usize..=4,
        ) {
            let g = Metric::new(neg, 4 - neg);
            let vs: Vec<Vec<Rational>> = raw.iter().map(|v| v.iter().map(|&x| Rational::ratio(x, 1)).collect()).collect();
            match gram_schmidt_pseudo_exact(&vs, &g) {
                Err(Error::DegenerateSpan(_)) => {}
                Err(e) => prop_assert!(false, "unexpected error {e}"),
                Ok(out) => {
                    for (i, a) in out.iter().enumerate() {
                        for (j, b) in out.iter().enumerate() {
                            let v = inner_unchecked(&a.coords, &b.coords, &g);
                            if i == j {
                                let s = v * a.scale_sq.clone();
                                prop_assert!(s == Rational::ratio(1, 1) || s == Rational::ratio(-1, 1));
                            } else {
                                prop_assert_eq!(v, Rational::ratio(0, 1));
                            }
                        }
                    }
                }
            }
        }
    }
}

use super::{CliffordSystem, Operator};
use crate::error::{Error, Result};
use crate::exact::Scalar;

/// `Q = Σ c_i P_i` in the span of a system.
#[derive(Debug, Clone)]
pub struct SigmaElement<'a, T> {
    pub system: &'a CliffordSystem<T>,
    pub coeffs: Vec<T>,
}

impl<'a, T: Scalar> SigmaElement<'a, T> {
    pub fn new(system: &'a CliffordSystem<T>, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), system.m, "one coefficient per operator");
        Self { system, coeffs }
    }

    /// The basis element `P_i` (0-based).
    pub fn basis(system: &'a CliffordSystem<T>, i: usize) -> Self {
        let mut coeffs = vec![T::zero(); system.m];
        coeffs[i] = T::one();
        Self { system, coeffs }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); x.len()];
        for (c, op) in self.coeffs.iter().zip(&self.system.operators) {
            if c.is_zero() {
                continue;
            }
            for (o, y) in out.iter_mut().zip(op.apply(x)) {
                *o = o.clone() + c.clone() * y;
            }
        }
        out
    }

    /// The operator `Σ c_i P_i`, flattened to signed-permutation terms when
    /// the system allows.
    pub fn operator(&self) -> Operator<T> {
        let mut terms = Vec::new();
        let mut dense = None;
        for (c, op) in self.coeffs.iter().zip(&self.system.operators) {
            match op {
                Operator::Perm(p) => terms.push((c.clone(), p.clone())),
                Operator::Combination(t) => {
                    terms.extend(t.iter().map(|(a, p)| (c.clone() * a.clone(), p.clone())))
                }
                Operator::Dense(d) => {
                    let scaled = d.scale(c);
                    dense = Some(match dense {
                        None => scaled,
                        Some(acc) => scaled.add(&acc).expect("same order"),
                    });
                }
            }
        }
        match dense {
            None => Operator::combination(terms),
            Some(mut acc) => {
                if !terms.is_empty() {
                    acc = acc.add(&Operator::combination(terms).to_dense()).expect("same order");
                }
                Operator::Dense(acc)
            }
        }
    }
}

/// `trace(QQ') / (2l)`.
pub fn sigma_metric<T: Scalar>(q: &SigmaElement<'_, T>, q2: &SigmaElement<'_, T>) -> Result<T> {
    if !std::ptr::eq(q.system, q2.system) && q.system != q2.system {
        return Err(Error::InvalidParameters("Σ-elements belong to different systems".into()));
    }
    let sys = q.system;
    let mut total = T::zero();
    for (i, a) in q.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q2.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let tr = sys.operators[i].compose(&sys.operators[j]).trace();
            total = total + a.clone() * b.clone() * tr;
        }
    }
    Ok(total / T::ratio(2 * sys.l as i64, 1))
}

/// `ᵗc η c'`.
pub fn sigma_metric_eta<T: Scalar>(q: &SigmaElement<'_, T>, q2: &SigmaElement<'_, T>) -> T {
    let eta = q.system.eta();
    q.coeffs
        .iter()
        .zip(&q2.coeffs)
        .enumerate()
        .fold(T::zero(), |acc, (i, (a, b))| {
            let t = a.clone() * b.clone();
            if eta.sign(i) < 0 {
                acc - t
            } else {
                acc + t
            }
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_family, lift_to_clifford_system};
    use crate::exact::Rational;
    use proptest::prelude::*;

    fn system(m: usize, r: usize) -> CliffordSystem<Rational> {
        lift_to_clifford_system(&construct_family(m, r).unwrap().0, 1).unwrap()
    }

    #[test]
    fn basis_values() {
        let s = system(4, 0);
        let p1 = SigmaElement::basis(&s, 0);
        let p2 = SigmaElement::basis(&s, 1);
        assert_eq!(sigma_metric(&p1, &p1).unwrap(), Rational::ratio(1, 1));
        assert_eq!(sigma_metric(&p1, &p2).unwrap(), Rational::ratio(0, 1));
        let s = system(4, 2);
        let p1 = SigmaElement::basis(&s, 0);
        assert_eq!(sigma_metric(&p1, &p1).unwrap(), Rational::ratio(-1, 1));
    }

    #[test]
    fn mixed_systems_rejected() {
        let a = system(4, 0);
        let b = system(4, 4);
        assert!(sigma_metric(&SigmaElement::basis(&a, 0), &SigmaElement::basis(&b, 0)).is_err());
    }

    proptest! {
        #[test]
        fn trace_route_matches_eta_route(
            c in proptest::collection::vec(-4i64..=4, 4),
            d in proptest::collection::vec(-4i64..=4, 4),
            r in prop_oneof![Just(0usize), Just(2), Just(4)],
        ) {
            let s = system(4, r);
            let q = SigmaElement::new(&s, c.iter().map(|&x| Rational::ratio(x, 1)).collect());
            let q2 = SigmaElement::new(&s, d.iter().map(|&x| Rational::ratio(x, 1)).collect());
            prop_assert_eq!(sigma_metric(&q, &q2).unwrap(), sigma_metric_eta(&q, &q2));
        }
    }
}

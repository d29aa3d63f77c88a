use serde::{Deserialize, Serialize};

use super::{CliffordSystem, Operator};
use crate::construction::ConstructionTrace;
use crate::error::{Error, Result};
use crate::exact::serial::{MatrixJson, StoredMatrix};
use crate::exact::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemHeader {
    pub l: usize,
    pub s: usize,
    pub m: usize,
    pub r: usize,
}

/// On-disk form of an exact system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFile {
    pub m: usize,
    pub r: usize,
    pub l: usize,
    pub s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<ConstructionTrace>,
    pub operators: Vec<MatrixJson>,
}

impl SystemFile {
    pub fn from_system(
        sys: &CliffordSystem<Rational>,
        d: Option<usize>,
        family_order: Option<usize>,
        trace: Option<ConstructionTrace>,
    ) -> Self {
        let metric = sys.metric();
        let operators = sys
            .operators
            .iter()
            .map(|op| match op {
                Operator::Perm(p) => StoredMatrix::SignedPerm(p.clone()),
                other => StoredMatrix::Dense(other.to_dense()),
            })
            .map(|m| m.to_json(metric))
            .collect();
        Self { m: sys.m, r: sys.r, l: sys.l, s: sys.s, d, family_order, trace, operators }
    }

    /// Parses the operators; relations are not checked here.
    pub fn to_system(&self) -> Result<CliffordSystem<Rational>> {
        if self.operators.len() != self.m {
            return Err(Error::Malformed(format!(
                "header says m = {} but {} operators are listed",
                self.m,
                self.operators.len()
            )));
        }
        let mut ops = Vec::with_capacity(self.m);
        for (i, mj) in self.operators.iter().enumerate() {
            if mj.order != 2 * self.l {
                return Err(Error::Malformed(format!(
                    "operator {} has order {} but 2l = {}",
                    i + 1,
                    mj.order,
                    2 * self.l
                )));
            }
            if mj.metric.neg != self.s {
                return Err(Error::Malformed(format!("operator {} carries a different metric", i + 1)));
            }
            ops.push(match StoredMatrix::from_json(mj)? {
                StoredMatrix::SignedPerm(p) => Operator::Perm(p),
                StoredMatrix::Dense(d) => Operator::Dense(d),
            });
        }
        Ok(CliffordSystem::new_unchecked(self.l, self.s, self.m, self.r, ops))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_family, lift_to_clifford_system};

    #[test]
    fn round_trip() {
        let (fam, trace) = construct_family(4, 0).unwrap();
        let sys = lift_to_clifford_system(&fam, 1).unwrap();
        let file = SystemFile::from_system(&sys, Some(1), Some(fam.order), Some(trace));
        let text = serde_json::to_string(&file).unwrap();
        let back: SystemFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_system().unwrap(), sys);
    }

    #[test]
    fn header_mismatch_is_malformed() {
        let (fam, _) = construct_family(4, 4).unwrap();
        let sys = lift_to_clifford_system(&fam, 1).unwrap();
        let mut file = SystemFile::from_system(&sys, None, None, None);
        file.m = 5;
        assert!(matches!(file.to_system(), Err(Error::Malformed(_))));
    }
}

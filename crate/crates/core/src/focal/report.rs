//! Connectedness census and the full analysis report of one exact system.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::clifford::{CliffordSystem, SystemHeader};
use crate::error::{Error, Result};
use crate::exact::{Rational, ScaledVector};

use super::eigen::{check_parity, cross_gram, eigensplit, CaseLabel, EigenSplit, SignatureData};
use super::level::{w_rn_interval, RegularRange};
use super::strata::{
    components_of, eigenspace_point, home_side, nonempty_strata, stratum_of_scaled, Component, StratumLabel,
};
use super::witness::{inhomogeneity_witness, mixed_point, n_plus_witness, scaled_json, WitnessRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumStatus {
    Witnessed,
    EmptyByCase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StratumEntry {
    pub label: StratumLabel,
    pub status: StratumStatus,
    pub witness_point: Option<ScaledVector<Rational>>,
    /// The witness re-checked on `M_+` and in this stratum.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Census {
    pub case: CaseLabel,
    pub components: Vec<Component>,
    pub strata: Vec<StratumEntry>,
}

impl Census {
    pub fn passed(&self) -> bool {
        self.strata.iter().all(|s| s.status == StratumStatus::EmptyByCase || s.verified)
    }

    pub fn witnessed(&self) -> Vec<StratumLabel> {
        self.strata.iter().filter(|s| s.status == StratumStatus::Witnessed).map(|s| s.label).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case,
            "component_count": self.components.len(),
            "components": self.components,
            "strata": self.strata.iter().map(|s| json!({
                "label": s.label,
                "status": s.status,
                "witness_point": s.witness_point.as_ref().map(scaled_json),
                "verified": s.verified,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Components of `M_+` from the case, each non-empty stratum backed by an
/// explicit exact point: eigenspace points for `M_{+,1}`, `M_{+,2}` and a
/// mixed point `(x' + y')/√2` for `M_{+,3}`.
pub fn connectedness_census(sys: &CliffordSystem<Rational>) -> Result<Census> {
    check_parity(sys)?;
    let split = eigensplit(sys)?;
    let case = SignatureData::of(sys, &split).classify()?;
    census_for(sys, &split, case)
}

fn census_for(sys: &CliffordSystem<Rational>, split: &EigenSplit<Rational>, case: CaseLabel) -> Result<Census> {
    let present = nonempty_strata(case);
    let mut strata = Vec::new();
    for label in [StratumLabel::One, StratumLabel::Two, StratumLabel::Three] {
        if !present.contains(&label) {
            strata.push(StratumEntry { label, status: StratumStatus::EmptyByCase, witness_point: None, verified: true });
            continue;
        }
        let point = match label {
            StratumLabel::One => eigenspace_point(sys, split, 1),
            StratumLabel::Two => eigenspace_point(sys, split, -1),
            StratumLabel::Three => {
                let eps = home_side(case, split, Component::Whole)?;
                Some(mixed_point(sys, split, eps, 1)?.point)
            }
        }
        .ok_or_else(|| Error::Construction(format!("no point constructed in {label} for case {case}")))?;
        let verified = stratum_of_scaled(sys, &point).map(|s| s == label).unwrap_or(false);
        strata.push(StratumEntry { label, status: StratumStatus::Witnessed, witness_point: Some(point), verified });
    }
    Ok(Census { case, components: components_of(case), strata })
}

/// Inhomogeneity certificates, or why there are none.
#[derive(Debug, Clone, PartialEq)]
pub enum InhomogeneityOutcome {
    Records(Vec<WitnessRecord>),
    HypothesisUnmet(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSummary {
    pub dims: (usize, usize),
    pub s1: usize,
    pub s2: usize,
    pub cross_gram_zero: bool,
}

/// Everything the analysis computes for one system.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub header: SystemHeader,
    pub w_rn: RegularRange,
    /// Set when the system lies outside `m ≡ 0 mod 4`, `r` even.
    pub out_of_scope: Option<String>,
    pub signature: Option<SignatureData>,
    pub eigensplit: Option<EigenSummary>,
    pub census: Option<Census>,
    pub n_plus_witnesses: Vec<WitnessRecord>,
    pub inhomogeneity: Option<InhomogeneityOutcome>,
}

impl AnalysisReport {
    pub fn case(&self) -> Option<CaseLabel> {
        self.census.as_ref().map(|c| c.case)
    }

    /// Named consistency checks; all must hold for a passing report.
    pub fn checks(&self) -> BTreeMap<&'static str, bool> {
        let mut out = BTreeMap::new();
        if let Some(e) = &self.eigensplit {
            out.insert("eigensplit", e.dims == (self.header.l, self.header.l) && e.cross_gram_zero);
        }
        if let Some(c) = &self.census {
            out.insert("census", c.passed());
        }
        if self.out_of_scope.is_none() {
            out.insert(
                "n_plus_witness",
                !self.n_plus_witnesses.is_empty() && self.n_plus_witnesses.iter().all(WitnessRecord::passed),
            );
        }
        if let Some(InhomogeneityOutcome::Records(rs)) = &self.inhomogeneity {
            out.insert("inhomogeneity_witness", !rs.is_empty() && rs.iter().all(WitnessRecord::passed));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks().values().all(|&b| b)
    }

    pub fn hypothesis_unmet(&self) -> bool {
        self.out_of_scope.is_some() || matches!(self.inhomogeneity, Some(InhomogeneityOutcome::HypothesisUnmet(_)))
    }

    pub fn to_json(&self) -> Value {
        let inhomogeneity = match &self.inhomogeneity {
            None => Value::Null,
            Some(InhomogeneityOutcome::Records(rs)) => Value::Array(rs.iter().map(WitnessRecord::to_json).collect()),
            Some(InhomogeneityOutcome::HypothesisUnmet(why)) => json!({ "status": "hypothesis_unmet", "reason": why }),
        };
        let census = self.census.as_ref().map(Census::to_json);
        json!({
            "system_header": self.header,
            "w_rn": self.w_rn,
            "out_of_scope": self.out_of_scope,
            "signature": self.signature,
            "case": self.case(),
            "eigensplit": self.eigensplit,
            "components": census.as_ref().map(|c| c["components"].clone()),
            "strata": census.as_ref().map(|c| c["strata"].clone()),
            "census": census,
            "n_plus_witness": self.n_plus_witnesses.iter().map(WitnessRecord::to_json).collect::<Vec<_>>(),
            "inhomogeneity_witness": inhomogeneity,
            "checks": self.checks(),
            "passed": self.passed(),
        })
    }
}

/// Verifies the Clifford relations, then runs the eigenspace analysis,
/// case classification, census and witnesses.
///
/// A relation failure is an error; a system outside the parity scope yields
/// a partial report with `out_of_scope` set.
pub fn analyze(sys: &CliffordSystem<Rational>) -> Result<AnalysisReport> {
    sys.verify_relations()?;
    let mut report = AnalysisReport {
        header: sys.header(),
        w_rn: w_rn_interval(sys),
        out_of_scope: None,
        signature: None,
        eigensplit: None,
        census: None,
        n_plus_witnesses: Vec::new(),
        inhomogeneity: None,
    };
    if let Err(e) = check_parity(sys) {
        report.out_of_scope = Some(e.to_string());
        return Ok(report);
    }
    let split = eigensplit(sys)?;
    let signature = SignatureData::of(sys, &split);
    let case = signature.classify()?;
    report.signature = Some(signature);
    report.eigensplit = Some(EigenSummary {
        dims: split.dims(),
        s1: split.s1,
        s2: split.s2,
        cross_gram_zero: cross_gram(sys, &split).data().iter().all(num_traits::Zero::is_zero),
    });
    report.census = Some(census_for(sys, &split, case)?);
    let components = components_of(case);
    report.n_plus_witnesses = components.iter().map(|&c| n_plus_witness(sys, c)).collect::<Result<_>>()?;
    report.inhomogeneity = Some(if sys.l <= sys.m {
        InhomogeneityOutcome::HypothesisUnmet(format!("needs l > m, got l = {}, m = {}", sys.l, sys.m))
    } else {
        InhomogeneityOutcome::Records(
            components.iter().map(|&c| inhomogeneity_witness(sys, c)).collect::<Result<_>>()?,
        )
    });
    Ok(report)
}

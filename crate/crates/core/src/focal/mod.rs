//! Focal varieties `M_±` of the isoparametric family attached to a Clifford
//! system, their strata, and the shape-operator test for `N_+`.

pub mod eigen;
pub mod level;
pub mod report;
pub mod sample;
pub mod shape;
pub mod strata;
pub mod witness;

pub use eigen::{classify_case, eigensplit, CaseLabel, EigenSplit, SignatureData};
pub use level::{
    constraint_values, eval_big_f, eval_f, eval_h, focal_map_phi, m_plus_membership, m_plus_membership_tol,
    solve_q_v, unit_normal_xi, w_rn_interval, RegularRange, MEMBERSHIP_TOL,
};
pub use shape::{n_plus_membership, shape_kernel, NPlusVerdict};
pub use strata::{components_of, path_witness, stratum_of, Component, StratumLabel};
pub use witness::{inhomogeneity_witness, n_plus_witness, WitnessRecord};
pub use report::{analyze, connectedness_census, AnalysisReport, Census};
pub use sample::{sample_level_set, sample_m_plus, sample_normal};

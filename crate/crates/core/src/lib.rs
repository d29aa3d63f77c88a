//! Exact construction and analysis of Clifford systems on pseudo-Euclidean
//! space and of the focal varieties of their isoparametric families.

pub mod catalog;
pub mod cli;
pub mod clifford;
pub mod construction;
pub mod error;
pub mod exact;
pub mod focal;

pub use clifford::{CliffordSystem, Operator};
pub use error::{Error, Result};
pub use exact::{DenseMatrix, Metric, Rational, Scalar, ScaledVector, SignedPermMatrix};

pub type ExactMatrix = DenseMatrix<Rational>;
pub type RealMatrix = DenseMatrix<f64>;
pub type ExactSystem = CliffordSystem<Rational>;
pub type RealSystem = CliffordSystem<f64>;

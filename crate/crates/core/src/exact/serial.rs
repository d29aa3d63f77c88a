//! JSON form of matrices: `{order, metric: {neg, pos}, kind, data}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::dense::DenseMatrix;
use super::metric::Metric;
use super::scalar::{format_rational, parse_rational, Rational};
use super::signed_perm::SignedPermMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub order: usize,
    pub metric: Metric,
    pub kind: String,
    pub data: Value,
}

/// A matrix as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredMatrix {
    SignedPerm(SignedPermMatrix),
    Dense(DenseMatrix<Rational>),
}

impl StoredMatrix {
    pub fn order(&self) -> usize {
        match self {
            Self::SignedPerm(p) => p.order(),
            Self::Dense(d) => d.rows(),
        }
    }

    pub fn to_json(&self, metric: Metric) -> MatrixJson {
        match self {
            Self::SignedPerm(p) => MatrixJson {
                order: p.order(),
                metric,
                kind: "signed_perm".into(),
                data: json!({
                    "image": p.image().iter().map(|i| i + 1).collect::<Vec<_>>(),
                    "sign": p.signs(),
                }),
            },
            Self::Dense(d) => MatrixJson {
                order: d.rows(),
                metric,
                kind: "dense".into(),
                data: Value::Array(
                    d.to_rows()
                        .iter()
                        .map(|row| row.iter().map(|q| Value::String(format_rational(q))).collect())
                        .collect(),
                ),
            },
        }
    }

    pub fn from_json(m: &MatrixJson) -> Result<Self> {
        if m.metric.dim() != m.order {
            return Err(Error::Malformed(format!(
                "metric dimension {} does not match order {}",
                m.metric.dim(),
                m.order
            )));
        }
        match m.kind.as_str() {
            "signed_perm" => {
                #[derive(Deserialize)]
                struct Data {
                    image: Vec<usize>,
                    sign: Vec<i8>,
                }
                let d: Data = serde_json::from_value(m.data.clone())
                    .map_err(|e| Error::Malformed(format!("signed_perm data: {e}")))?;
                if d.image.len() != m.order {
                    return Err(Error::Malformed("image length differs from order".into()));
                }
                if d.image.contains(&0) {
                    return Err(Error::Malformed("image indices are 1-based".into()));
                }
                let image = d.image.iter().map(|i| i - 1).collect();
                Ok(Self::SignedPerm(SignedPermMatrix::new(image, d.sign)?))
            }
            "dense" => {
                let rows: Vec<Vec<String>> = serde_json::from_value(m.data.clone())
                    .map_err(|e| Error::Malformed(format!("dense data: {e}")))?;
                if rows.len() != m.order {
                    return Err(Error::Malformed("row count differs from order".into()));
                }
                let parsed = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| {
                                parse_rational(s)
                                    .ok_or_else(|| Error::Malformed(format!("bad rational {s:?}")))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let d = DenseMatrix::from_rows(parsed)?;
                if !d.is_square() {
                    return Err(Error::Malformed("dense matrix is not square".into()));
                }
                Ok(Self::Dense(d))
            }
            other => Err(Error::Malformed(format!("unknown matrix kind {other:?}"))),
        }
    }
}

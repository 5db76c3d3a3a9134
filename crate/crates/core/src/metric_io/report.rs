use serde::Serialize;

use crate::scalar::{format_rational, Backend, Q};

/// Exact invariants are written as rational strings, float ones as numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportValue {
    Exact(String),
    Float(f64),
}

impl ReportValue {
    pub fn exact(v: &Q) -> Self {
        ReportValue::Exact(format_rational(v))
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            ReportValue::Float(x) => *x,
            ReportValue::Exact(s) => crate::scalar::parse_rational(s)
                .map(|q| crate::scalar::Scalar::to_f64(&q))
                .unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantEntry {
    pub name: String,
    pub order: usize,
    pub backend: Backend,
    pub value: ReportValue,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualEntry {
    pub check: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub dim: usize,
    pub signature: [usize; 2],
    pub order: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub invariants: Vec<InvariantEntry>,
    pub residuals: Vec<ResidualEntry>,
    pub meta: Meta,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

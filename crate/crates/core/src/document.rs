//! Lossless serialized form of a subalgebra: exact `num/den` strings.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{ExactMatrix, ExactScalar};
use crate::liecore::{AlgebraKind, AmbientAlgebra, MetricSignature, Subalgebra};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientDescriptor {
    pub p: usize,
    pub q: usize,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    pub ambient: AmbientDescriptor,
    /// Change of basis `S` with `K = S g S^T`.
    pub frame: Vec<Vec<String>>,
    pub names: Vec<String>,
    pub basis: Vec<Vec<Vec<String>>>,
    /// Free-form label of the family the algebra was built from.
    pub origin: String,
}

fn kind_name(k: AlgebraKind) -> &'static str {
    match k {
        AlgebraKind::Euclidean => "euclidean",
        AlgebraKind::Orthogonal => "orthogonal",
        AlgebraKind::Conformal => "conformal",
    }
}

fn parse_kind(s: &str) -> Result<AlgebraKind> {
    match s {
        "euclidean" => Ok(AlgebraKind::Euclidean),
        "orthogonal" => Ok(AlgebraKind::Orthogonal),
        "conformal" => Ok(AlgebraKind::Conformal),
        _ => Err(Error::Parse(format!("unknown algebra kind {s:?}"))),
    }
}

pub fn matrix_strings(m: &ExactMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ExactScalar::to_string).collect()).collect()
}

pub fn matrix_from_strings(rows: &[Vec<String>]) -> Result<ExactMatrix> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|s| s.parse::<ExactScalar>()).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ExactMatrix::from_rows(parsed)
}

impl AlgebraDocument {
    pub fn from_subalgebra(s: &Subalgebra, origin: &str) -> Self {
        let amb = &s.ambient;
        let sig = amb.signature();
        AlgebraDocument {
            ambient: AmbientDescriptor { p: sig.p, q: sig.q, kind: kind_name(amb.kind).into() },
            frame: matrix_strings(&amb.frame),
            names: s.describe(),
            basis: s.matrices().iter().map(matrix_strings).collect(),
            origin: origin.into(),
        }
    }

    pub fn ambient(&self) -> Result<Arc<AmbientAlgebra>> {
        let kind = parse_kind(&self.ambient.kind)?;
        let sig = MetricSignature::new(self.ambient.p, self.ambient.q)?;
        AmbientAlgebra::with_frame(kind, sig, matrix_from_strings(&self.frame)?)
    }

    pub fn to_subalgebra(&self) -> Result<Subalgebra> {
        let amb = self.ambient()?;
        let mats = self.basis.iter().map(|m| matrix_from_strings(m)).collect::<Result<Vec<_>>>()?;
        Subalgebra::from_independent(&amb, mats)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

//! JSON documents exchanged with the command line and other tools.
//!
//! * sequence: `{"values": ["3", "-1/2", "0.25"]}` (JSON numbers are accepted too);
//! * operator: `{"n_in", "n_out", "rows": [{"out": j, "entries": [[i, "p/q"], ...]}]}`;
//! * certificate: the operator fields plus `l1_bound`, `l0_expansion`, `pipeline`.
//!
//! Indices in documents are 1-based. Rationals are written in canonical
//! reduced form.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::construction::{OperatorCertificate, Provenance};
use crate::error::{Error, Result};
use crate::operator::SparseOperator;
use crate::rational::{format_rat, parse_rat, Rat};
use crate::sequence::FiniteSequence;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub values: Vec<Value>,
}

impl SequenceDoc {
    pub fn from_sequence(x: &FiniteSequence) -> Self {
        Self {
            values: x.values().iter().map(|v| Value::String(format_rat(v))).collect(),
        }
    }

    pub fn to_sequence(&self) -> Result<FiniteSequence> {
        let values = self
            .values
            .iter()
            .map(|v| match v {
                Value::String(s) => parse_rat(s),
                Value::Number(n) => parse_rat(&n.to_string()),
                other => Err(Error::ParseRational(other.to_string())),
            })
            .collect::<Result<Vec<Rat>>>()?;
        Ok(FiniteSequence::new(values))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDoc {
    pub out: usize,
    pub entries: Vec<(usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub n_in: usize,
    pub n_out: usize,
    pub rows: Vec<RowDoc>,
}

impl OperatorDoc {
    /// Only nonempty rows are written.
    pub fn from_operator(op: &SparseOperator) -> Self {
        let rows = op
            .rows()
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(j, r)| RowDoc {
                out: j + 1,
                entries: r.iter().map(|(i, c)| (i + 1, format_rat(c))).collect(),
            })
            .collect();
        Self {
            n_in: op.n_in(),
            n_out: op.n_out(),
            rows,
        }
    }

    pub fn to_operator(&self) -> Result<SparseOperator> {
        let mut rows = vec![Vec::new(); self.n_out];
        for row in &self.rows {
            if row.out == 0 || row.out > self.n_out {
                return Err(Error::InvalidInput(format!(
                    "row index {} outside 1..={}",
                    row.out, self.n_out
                )));
            }
            for (i, c) in &row.entries {
                if *i == 0 || *i > self.n_in {
                    return Err(Error::InvalidInput(format!(
                        "column index {i} outside 1..={}",
                        self.n_in
                    )));
                }
                rows[row.out - 1].push((i - 1, parse_rat(c)?));
            }
        }
        SparseOperator::new(self.n_in, self.n_out, rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    #[serde(flatten)]
    pub operator: OperatorDoc,
    pub l1_bound: String,
    pub l0_expansion: usize,
    pub pipeline: Provenance,
}

impl CertificateDoc {
    pub fn from_certificate(cert: &OperatorCertificate) -> Self {
        Self {
            operator: OperatorDoc::from_operator(&cert.operator),
            l1_bound: format_rat(&cert.l1_bound),
            l0_expansion: cert.l0_expansion,
            pipeline: cert.pipeline.clone(),
        }
    }

    /// Keeps the claimed bounds as written so that verification can compare them.
    pub fn to_certificate(&self) -> Result<OperatorCertificate> {
        Ok(OperatorCertificate {
            operator: self.operator.to_operator()?,
            l1_bound: parse_rat(&self.l1_bound)?,
            l0_expansion: self.l0_expansion,
            pipeline: self.pipeline.clone(),
        })
    }
}

pub fn parse_sequence(json: &str) -> Result<FiniteSequence> {
    let doc: SequenceDoc =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.to_sequence()
}

pub fn parse_operator(json: &str) -> Result<SparseOperator> {
    let doc: OperatorDoc =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.to_operator()
}

pub fn parse_certificate(json: &str) -> Result<OperatorCertificate> {
    let doc: CertificateDoc =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.to_certificate()
}

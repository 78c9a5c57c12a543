//! CTJ ("curvature tensor JSON") documents.
//!
//! ```json
//! {"format":"ctj-1","n":4,
//!  "components":[{"i":1,"j":2,"k":1,"l":2,"v":1.0}],
//!  "metadata":{"model":"s2xs2"},
//!  "J":[[0,-1,0,0],[1,0,0,0],[0,0,0,-1],[0,0,1,0]]}
//! ```
//!
//! Components are 1-based canonical slots (`i<j`, `k<l`, `(i,j) <= (k,l)`);
//! omitted slots are zero. `J` is optional and stored row by row.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CoskError, Result};
use crate::models::ComplexStructure;
use crate::tensor::{AlgebraicCurvatureTensor, DEFAULT_BIANCHI_TOL};

pub const FORMAT: &str = "ctj-1";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub v: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtjDocument {
    pub format: String,
    pub n: usize,
    pub components: Vec<Component>,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
}

impl CtjDocument {
    pub fn from_tensor(r: &AlgebraicCurvatureTensor, j: Option<&ComplexStructure>) -> Self {
        let components = r
            .components()
            .into_iter()
            .map(|(i, j, k, l, v)| Component { i, j, k, l, v })
            .collect();
        let j = j.map(|cs| {
            let m = cs.matrix();
            (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
        });
        Self {
            format: FORMAT.to_string(),
            n: r.dim(),
            components,
            metadata: BTreeMap::new(),
            j,
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| CoskError::Format(e.to_string()))?;
        if doc.format != FORMAT {
            return Err(CoskError::Format(format!("unsupported format {:?}, expected {FORMAT:?}", doc.format)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize") + "\n"
    }

    /// Builds the tensor without any Bianchi check.
    pub fn to_tensor_unvalidated(&self) -> Result<AlgebraicCurvatureTensor> {
        let entries: Vec<_> = self.components.iter().map(|c| (c.i, c.j, c.k, c.l, c.v)).collect();
        AlgebraicCurvatureTensor::from_components(self.n, &entries)
    }

    /// Builds the tensor and checks the Bianchi identity at the ingestion
    /// tolerance.
    pub fn to_tensor(&self) -> Result<AlgebraicCurvatureTensor> {
        let r = self.to_tensor_unvalidated()?;
        r.check_bianchi(DEFAULT_BIANCHI_TOL)?;
        Ok(r)
    }

    pub fn complex_structure(&self) -> Result<Option<ComplexStructure>> {
        let Some(rows) = &self.j else {
            return Ok(None);
        };
        if rows.len() != self.n {
            return Err(CoskError::DimensionMismatch { expected: self.n, found: rows.len() });
        }
        if let Some(bad) = rows.iter().find(|row| row.len() != self.n) {
            return Err(CoskError::DimensionMismatch { expected: self.n, found: bad.len() });
        }
        let m = DMatrix::from_fn(self.n, self.n, |r, c| rows[r][c]);
        ComplexStructure::new(m).map(Some)
    }
}

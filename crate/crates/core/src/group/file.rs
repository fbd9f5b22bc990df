//! JSON group files:
//! `{"name", "order", "mult", "inv", "identity", "irreps": [{"label", "dim", "matrices"}]}`
//! with matrices indexed by element and complex entries as `[re, im]`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GroupTable, Irrep, IrrepRegistry};
use crate::error::{Error, Result};
use crate::linalg::{matrix_from_rows, matrix_to_rows};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepFile {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    pub inv: Vec<usize>,
    pub identity: usize,
    #[serde(default)]
    pub irreps: Vec<IrrepFile>,
}

impl GroupFile {
    pub fn from_registry(registry: &IrrepRegistry) -> Self {
        let g = registry.group();
        Self {
            name: g.name().to_string(),
            order: g.order(),
            mult: g.mult_rows(),
            inv: g.inv_table().to_vec(),
            identity: g.identity(),
            irreps: registry
                .irreps()
                .iter()
                .map(|r| IrrepFile {
                    label: r.label.clone(),
                    dim: r.dim,
                    matrices: r.matrices.iter().map(matrix_to_rows).collect(),
                })
                .collect(),
        }
    }

    pub fn into_registry(self) -> Result<(Arc<GroupTable>, IrrepRegistry)> {
        if self.order != self.mult.len() {
            return Err(Error::MalformedGroup(format!(
                "declared order {} but table has {} rows",
                self.order,
                self.mult.len()
            )));
        }
        let table = Arc::new(GroupTable::from_tables(self.name, self.mult, self.inv, self.identity)?);
        let irreps = self
            .irreps
            .into_iter()
            .map(|r| {
                let matrices = r
                    .matrices
                    .iter()
                    .map(|rows| {
                        matrix_from_rows(rows)
                            .ok_or_else(|| Error::DimensionMismatch(format!("irrep {}: ragged matrix", r.label)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Irrep {
                    label: r.label,
                    dim: r.dim,
                    matrices,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let registry = IrrepRegistry::new(Arc::clone(&table), irreps)?;
        Ok((table, registry))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

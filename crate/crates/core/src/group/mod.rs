//! Finite groups as dense multiplication tables, together with registries of
//! irreducible unitary representations.
//!
//! Integration over the group always uses the normalized counting measure
//! `∫ f = (1/|G|) Σ_t f(t)`.

mod builtin;
mod file;
mod validate;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub use builtin::{builtin_by_name, builtin_group, GroupKind, BUILTIN_NAMES};
pub use file::{GroupFile, IrrepFile};
pub use validate::{
    validate_group, validate_irreps, GroupReport, GroupViolation, IrrepFailure, IrrepReport, IrrepResiduals, Tolerances,
};

/// Largest supported group order.
pub const MAX_ORDER: usize = 512;

/// A finite group given by its multiplication table.
///
/// Construction only checks shapes and index ranges; the group axioms are
/// checked by [`validate_group`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    name: String,
    order: usize,
    mult: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl GroupTable {
    pub fn from_tables(
        name: impl Into<String>,
        mult: Vec<Vec<usize>>,
        inv: Vec<usize>,
        identity: usize,
    ) -> Result<Self> {
        let order = mult.len();
        if order == 0 {
            return Err(Error::MalformedGroup("empty table".into()));
        }
        if order > MAX_ORDER {
            return Err(Error::MalformedGroup(format!(
                "order {order} exceeds the cap of {MAX_ORDER}"
            )));
        }
        if mult.iter().any(|row| row.len() != order) {
            return Err(Error::MalformedGroup("multiplication table is not square".into()));
        }
        if inv.len() != order {
            return Err(Error::MalformedGroup(format!(
                "inverse table has length {} but order is {order}",
                inv.len()
            )));
        }
        let flat: Vec<usize> = mult.into_iter().flatten().collect();
        if flat.iter().chain(inv.iter()).any(|&x| x >= order) || identity >= order {
            return Err(Error::MalformedGroup("element index out of range".into()));
        }
        Ok(Self {
            name: name.into(),
            order,
            mult: flat,
            inv,
            identity,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn mult_rows(&self) -> Vec<Vec<usize>> {
        self.mult.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn inv_table(&self) -> &[usize] {
        &self.inv
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// True when both handles denote the same group (same table).
pub fn same_group(a: &Arc<GroupTable>, b: &Arc<GroupTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// One irreducible unitary representation: a `dim × dim` matrix per element.
#[derive(Clone, Debug)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub matrices: Vec<CMatrix>,
}

impl Irrep {
    /// `χ(t) = trace U(t)` for every element.
    pub fn character(&self) -> Vec<Complex64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

/// The irreps of a group, one per equivalence class.
#[derive(Clone, Debug)]
pub struct IrrepRegistry {
    group: Arc<GroupTable>,
    irreps: Vec<Irrep>,
}

impl IrrepRegistry {
    /// Builds a registry, checking only that every matrix has the declared shape.
    pub fn new(group: Arc<GroupTable>, irreps: Vec<Irrep>) -> Result<Self> {
        for irrep in &irreps {
            if irrep.matrices.len() != group.order() {
                return Err(Error::DimensionMismatch(format!(
                    "irrep {} has {} matrices for a group of order {}",
                    irrep.label,
                    irrep.matrices.len(),
                    group.order()
                )));
            }
            if let Some((t, m)) = irrep
                .matrices
                .iter()
                .enumerate()
                .find(|(_, m)| m.nrows() != irrep.dim || m.ncols() != irrep.dim)
            {
                return Err(Error::DimensionMismatch(format!(
                    "irrep {} element {t}: matrix is {}x{}, expected {d}x{d}",
                    irrep.label,
                    m.nrows(),
                    m.ncols(),
                    d = irrep.dim
                )));
            }
        }
        Ok(Self { group, irreps })
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|r| r.dim).collect()
    }

    pub fn dim_square_sum(&self) -> usize {
        self.irreps.iter().map(|r| r.dim * r.dim).sum()
    }

    pub fn is_complete(&self) -> bool {
        self.dim_square_sum() == self.group.order()
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::IncompleteRegistry {
                dim_square_sum: self.dim_square_sum(),
                order: self.group.order(),
            })
        }
    }

    /// Character table, rows indexed by irrep and columns by element.
    pub fn character_table(&self) -> Vec<Vec<Complex64>> {
        self.irreps.iter().map(Irrep::character).collect()
    }

    /// Same registry with some irreps dropped or replaced; used to build
    /// deliberately broken registries.
    pub fn with_irreps(&self, irreps: Vec<Irrep>) -> Result<Self> {
        Self::new(Arc::clone(&self.group), irreps)
    }
}

use serde::Serialize;

use super::{GroupTable, IrrepRegistry};
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, CMatrix};

/// Tolerances for linear identities (unitarity, homomorphism) and quadratic
/// ones (character norms, orthogonality).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub linear: f64,
    pub quadratic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            linear: crate::LINEAR_TOL,
            quadratic: crate::QUADRATIC_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum GroupViolation {
    Associativity { a: usize, b: usize, c: usize },
    LeftIdentity { t: usize },
    RightIdentity { t: usize },
    LeftInverse { t: usize },
    RightInverse { t: usize },
}

/// Violated axioms; at most [`GroupReport::MAX_LISTED`] are listed but all are counted.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GroupReport {
    pub violations: Vec<GroupViolation>,
    pub total_violations: usize,
}

impl GroupReport {
    pub const MAX_LISTED: usize = 64;

    pub fn is_valid(&self) -> bool {
        self.total_violations == 0
    }

    fn push(&mut self, v: GroupViolation) {
        self.total_violations += 1;
        if self.violations.len() < Self::MAX_LISTED {
            self.violations.push(v);
        }
    }
}

pub fn validate_group(g: &GroupTable) -> GroupReport {
    let mut report = GroupReport::default();
    let n = g.order();
    let e = g.identity();
    for t in 0..n {
        if g.mul(e, t) != t {
            report.push(GroupViolation::LeftIdentity { t });
        }
        if g.mul(t, e) != t {
            report.push(GroupViolation::RightIdentity { t });
        }
        if g.mul(t, g.inv(t)) != e {
            report.push(GroupViolation::RightInverse { t });
        }
        if g.mul(g.inv(t), t) != e {
            report.push(GroupViolation::LeftInverse { t });
        }
    }
    for a in 0..n {
        for b in 0..n {
            let ab = g.mul(a, b);
            for c in 0..n {
                if g.mul(ab, c) != g.mul(a, g.mul(b, c)) {
                    report.push(GroupViolation::Associativity { a, b, c });
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepResiduals {
    pub label: String,
    pub dim: usize,
    /// max_t ‖U(t)*U(t) − I‖
    pub unitarity: f64,
    /// max_{s,t} ‖U(st) − U(s)U(t)‖
    pub homomorphism: f64,
    /// (1/|G|) Σ |χ(t)|²; equals 1 exactly for irreducibles.
    pub character_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum IrrepFailure {
    NotUnitary {
        label: String,
        residual: f64,
    },
    NotHomomorphism {
        label: String,
        residual: f64,
    },
    Reducible {
        label: String,
        character_norm: f64,
    },
    Incomplete {
        dim_square_sum: usize,
        order: usize,
    },
    CharactersNotOrthogonal {
        first: String,
        second: String,
        residual: f64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct IrrepReport {
    pub irreps: Vec<IrrepResiduals>,
    pub dim_square_sum: usize,
    pub order: usize,
    pub max_orthogonality_residual: f64,
    /// max_t |Σ_π d_π χ_π(t) − |G|·[t = e]|, the regular-representation identity.
    pub regular_character_residual: f64,
    pub failures: Vec<IrrepFailure>,
}

impl IrrepReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn max_unitarity(&self) -> f64 {
        self.irreps.iter().map(|r| r.unitarity).fold(0.0, f64::max)
    }

    pub fn max_homomorphism(&self) -> f64 {
        self.irreps.iter().map(|r| r.homomorphism).fold(0.0, f64::max)
    }
}

pub fn validate_irreps(g: &GroupTable, r: &IrrepRegistry, tol: &Tolerances) -> Result<IrrepReport> {
    if **r.group() != *g {
        return Err(Error::GroupMismatch {
            left: g.name().to_string(),
            right: r.group().name().to_string(),
        });
    }
    let n = g.order();
    let mut failures = Vec::new();
    let mut residuals = Vec::with_capacity(r.len());
    for irrep in r.irreps() {
        if irrep.matrices.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "irrep {} has {} matrices, group order {n}",
                irrep.label,
                irrep.matrices.len()
            )));
        }
        for m in &irrep.matrices {
            if m.nrows() != irrep.dim || m.ncols() != irrep.dim {
                return Err(Error::DimensionMismatch(format!(
                    "irrep {}: {}x{} matrix, expected {d}x{d}",
                    irrep.label,
                    m.nrows(),
                    m.ncols(),
                    d = irrep.dim
                )));
            }
        }
        let id = CMatrix::identity(irrep.dim, irrep.dim);
        let unitarity = irrep
            .matrices
            .iter()
            .map(|m| max_abs_diff(&(m.adjoint() * m), &id))
            .fold(0.0, f64::max);
        let mut homomorphism: f64 = 0.0;
        for s in 0..n {
            for t in 0..n {
                let prod = &irrep.matrices[s] * &irrep.matrices[t];
                homomorphism = homomorphism.max(max_abs_diff(&irrep.matrices[g.mul(s, t)], &prod));
            }
        }
        let character_norm = irrep.character().iter().map(|x| x.norm_sqr()).sum::<f64>() / n as f64;
        if unitarity > tol.linear {
            failures.push(IrrepFailure::NotUnitary {
                label: irrep.label.clone(),
                residual: unitarity,
            });
        }
        if homomorphism > tol.linear {
            failures.push(IrrepFailure::NotHomomorphism {
                label: irrep.label.clone(),
                residual: homomorphism,
            });
        }
        if (character_norm - 1.0).abs() > tol.quadratic {
            failures.push(IrrepFailure::Reducible {
                label: irrep.label.clone(),
                character_norm,
            });
        }
        residuals.push(IrrepResiduals {
            label: irrep.label.clone(),
            dim: irrep.dim,
            unitarity,
            homomorphism,
            character_norm,
        });
    }

    let dim_square_sum = r.dim_square_sum();
    if dim_square_sum != n {
        failures.push(IrrepFailure::Incomplete {
            dim_square_sum,
            order: n,
        });
    }

    let chars = r.character_table();
    let mut max_orthogonality_residual: f64 = 0.0;
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate().skip(i + 1) {
            let inner = a
                .iter()
                .zip(b)
                .map(|(x, y)| x * y.conj())
                .sum::<num_complex::Complex64>()
                / n as f64;
            let residual = inner.norm();
            max_orthogonality_residual = max_orthogonality_residual.max(residual);
            if residual > tol.quadratic {
                failures.push(IrrepFailure::CharactersNotOrthogonal {
                    first: r.irreps()[i].label.clone(),
                    second: r.irreps()[j].label.clone(),
                    residual,
                });
            }
        }
    }

    let regular_character_residual = (0..n)
        .map(|t| {
            let sum: num_complex::Complex64 = r
                .irreps()
                .iter()
                .zip(&chars)
                .map(|(irrep, chi)| chi[t] * irrep.dim as f64)
                .sum();
            let expected = if t == g.identity() { n as f64 } else { 0.0 };
            (sum - expected).norm()
        })
        .fold(0.0, f64::max);

    Ok(IrrepReport {
        irreps: residuals,
        dim_square_sum,
        order: n,
        max_orthogonality_residual,
        regular_character_residual,
        failures,
    })
}

//! Finite-dimensional complex algebras in coordinates.
//!
//! Polynomials, orthogonal pairs and representing maps are written against
//! [`FiniteAlgebra`], so one implementation serves the group algebra ℂ[G],
//! the matrix algebra 𝕄_k and truncated trigonometric polynomials on the circle.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::linalg::{operator_norm, vec_norm2, CMatrix};

/// Identifies the domain of a polynomial or linear map in files and reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDescriptor {
    /// ℂ[G], basis = point masses indexed by element (coordinates are values f(t)).
    Group { name: String, order: usize },
    /// 𝕄_k, basis E_ij in row-major order.
    Matrix { k: usize },
    /// Trigonometric polynomials with |k| ≤ cap, basis χ_{−cap}, …, χ_{cap}.
    Trig { cap: usize },
}

impl DomainDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            Self::Group { order, .. } => *order,
            Self::Matrix { k } => k * k,
            Self::Trig { cap } => 2 * cap + 1,
        }
    }
}

impl fmt::Display for DomainDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Group { name, .. } => write!(f, "C[{name}]"),
            Self::Matrix { k } => write!(f, "M_{k}"),
            Self::Trig { cap } => write!(f, "T_{cap}"),
        }
    }
}

/// Norms available on the coordinate algebras.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", content = "p", rename_all = "snake_case")]
pub enum DomainNorm {
    /// Normalized L^p (group), or quadrature L^p (circle).
    Lp(f64),
    /// Sup norm (group, circle).
    Linf,
    /// Operator norm (matrix algebra).
    Operator,
    /// Euclidean norm of the coordinate vector.
    Euclidean,
}

impl fmt::Display for DomainNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Lp(p) => write!(f, "L{p}"),
            Self::Linf => write!(f, "Linf"),
            Self::Operator => write!(f, "operator"),
            Self::Euclidean => write!(f, "euclidean"),
        }
    }
}

pub trait FiniteAlgebra: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn multiply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64>;

    /// Multiplicative identity, if the algebra is unital.
    fn unit(&self) -> Option<Vec<Complex64>>;

    fn descriptor(&self) -> DomainDescriptor;

    fn norm(&self, x: &[Complex64], which: DomainNorm) -> Result<f64>;

    /// A constant κ with max_i |x_i| ≤ κ‖x‖ for the given norm.
    fn coordinate_bound(&self, which: DomainNorm) -> Result<f64>;
}

pub type SharedAlgebra = Arc<dyn FiniteAlgebra>;

pub fn power(alg: &dyn FiniteAlgebra, x: &[Complex64], n: usize) -> Vec<Complex64> {
    assert!(n >= 1, "power needs n >= 1");
    let mut acc = x.to_vec();
    for _ in 1..n {
        acc = alg.multiply(x, &acc);
    }
    acc
}

/// max(‖ab‖, ‖ba‖) / (‖a‖‖b‖) in Euclidean coordinates; 0 when either factor vanishes.
pub fn product_residual(alg: &dyn FiniteAlgebra, a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = vec_norm2(a) * vec_norm2(b);
    if scale == 0.0 {
        return 0.0;
    }
    let ab = vec_norm2(&alg.multiply(a, b));
    let ba = vec_norm2(&alg.multiply(b, a));
    ab.max(ba) / scale
}

fn unsupported(which: DomainNorm, domain: &DomainDescriptor) -> Error {
    Error::UnsupportedNorm {
        norm: which.to_string(),
        domain: domain.to_string(),
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::BadExponent(p))
    } else {
        Ok(())
    }
}

/// The group algebra with convolution `(f∗g)(t) = (1/|G|) Σ_s f(s) g(s⁻¹t)`.
#[derive(Clone, Debug)]
pub struct GroupAlgebra {
    table: Arc<GroupTable>,
}

impl GroupAlgebra {
    pub fn new(table: Arc<GroupTable>) -> Self {
        Self { table }
    }

    pub fn table(&self) -> &Arc<GroupTable> {
        &self.table
    }
}

pub(crate) fn convolve_values(g: &GroupTable, f: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    let n = g.order();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (s, &fs) in f.iter().enumerate() {
        if fs == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (u, &hu) in h.iter().enumerate() {
            out[g.mul(s, u)] += fs * hu;
        }
    }
    let n = n as f64;
    out.iter_mut().for_each(|x| *x /= n);
    out
}

pub(crate) fn lp_values(values: &[Complex64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Ok(values.iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    let mean = values.iter().map(|x| x.norm().powf(p)).sum::<f64>() / values.len() as f64;
    Ok(mean.powf(1.0 / p))
}

impl FiniteAlgebra for GroupAlgebra {
    fn dim(&self) -> usize {
        self.table.order()
    }

    fn multiply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        convolve_values(&self.table, a, b)
    }

    fn unit(&self) -> Option<Vec<Complex64>> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[self.table.identity()] = Complex64::new(self.dim() as f64, 0.0);
        Some(v)
    }

    fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor::Group {
            name: self.table.name().to_string(),
            order: self.table.order(),
        }
    }

    fn norm(&self, x: &[Complex64], which: DomainNorm) -> Result<f64> {
        match which {
            DomainNorm::Lp(p) => lp_values(x, p),
            DomainNorm::Linf => lp_values(x, f64::INFINITY),
            DomainNorm::Euclidean => Ok(vec_norm2(x)),
            DomainNorm::Operator => Err(unsupported(which, &self.descriptor())),
        }
    }

    fn coordinate_bound(&self, which: DomainNorm) -> Result<f64> {
        let n = self.dim() as f64;
        match which {
            DomainNorm::Lp(p) => {
                check_exponent(p)?;
                Ok(if p.is_infinite() { 1.0 } else { n.powf(1.0 / p) })
            }
            DomainNorm::Linf | DomainNorm::Euclidean => Ok(1.0),
            DomainNorm::Operator => Err(unsupported(which, &self.descriptor())),
        }
    }
}

/// The full matrix algebra 𝕄_k with row-major coordinates.
#[derive(Clone, Copy, Debug)]
pub struct MatrixAlgebra {
    k: usize,
}

impl MatrixAlgebra {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "matrix algebra needs k >= 1");
        Self { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn to_matrix(&self, x: &[Complex64]) -> CMatrix {
        CMatrix::from_row_slice(self.k, self.k, x)
    }

    pub fn from_matrix(&self, m: &CMatrix) -> Vec<Complex64> {
        (0..self.k)
            .flat_map(|i| (0..self.k).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)])
            .collect()
    }

    /// Coordinates of the matrix unit E_ij.
    pub fn unit_matrix(&self, i: usize, j: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.k * self.k];
        v[i * self.k + j] = Complex64::new(1.0, 0.0);
        v
    }
}

impl FiniteAlgebra for MatrixAlgebra {
    fn dim(&self) -> usize {
        self.k * self.k
    }

    fn multiply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        self.from_matrix(&(self.to_matrix(a) * self.to_matrix(b)))
    }

    fn unit(&self) -> Option<Vec<Complex64>> {
        Some(self.from_matrix(&CMatrix::identity(self.k, self.k)))
    }

    fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor::Matrix { k: self.k }
    }

    fn norm(&self, x: &[Complex64], which: DomainNorm) -> Result<f64> {
        match which {
            DomainNorm::Operator => Ok(operator_norm(&self.to_matrix(x))),
            DomainNorm::Euclidean => Ok(vec_norm2(x)),
            _ => Err(unsupported(which, &self.descriptor())),
        }
    }

    fn coordinate_bound(&self, which: DomainNorm) -> Result<f64> {
        match which {
            DomainNorm::Operator | DomainNorm::Euclidean => Ok(1.0),
            _ => Err(unsupported(which, &self.descriptor())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn matrix_units_multiply() {
        let m = MatrixAlgebra::new(2);
        let e12 = m.unit_matrix(0, 1);
        let e21 = m.unit_matrix(1, 0);
        assert_eq!(m.multiply(&e12, &e21), m.unit_matrix(0, 0));
        assert_eq!(m.multiply(&e21, &e12), m.unit_matrix(1, 1));
        assert!(product_residual(&m, &m.unit_matrix(0, 0), &m.unit_matrix(1, 1)) == 0.0);
    }

    #[test]
    fn group_unit_is_delta() {
        let (g, _) = crate::group::builtin_by_name("s3").unwrap();
        let alg = GroupAlgebra::new(g);
        let unit = alg.unit().unwrap();
        let f: Vec<_> = (0..6).map(|t| c(t as f64, 1.0 - t as f64)).collect();
        assert_eq!(alg.multiply(&unit, &f), f);
        assert_eq!(alg.multiply(&f, &unit), f);
        assert!((alg.norm(&unit, DomainNorm::Lp(1.0)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_exponent() {
        let (g, _) = crate::group::builtin_by_name("z2").unwrap();
        let alg = GroupAlgebra::new(g);
        assert!(matches!(
            alg.norm(&[c(1.0, 0.0), c(0.0, 0.0)], DomainNorm::Lp(0.5)),
            Err(Error::BadExponent(_))
        ));
    }
}

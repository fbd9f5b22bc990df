//! The group algebra ℂ[G] (= L¹(G) = L^p(G) for finite G), its Fourier
//! transform, central idempotents and the ideal decomposition.
//!
//! Conventions: normalized counting measure, so `δ_e` takes the value `|G|`
//! at the identity and `f̂(π) = (1/|G|) Σ_t f(t) U_π(t⁻¹)`. With this
//! definition the transform reverses products: `(f∗g)^(π) = ĝ(π) f̂(π)`.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{check_exponent, convolve_values, lp_values};
use crate::error::{Error, Result};
use crate::group::{same_group, GroupTable, Irrep, IrrepRegistry};
use crate::linalg::{from_pairs, matrix_from_rows, matrix_to_rows, schatten_norm, to_pairs, CMatrix};
use crate::rng::complex_normal_vec;

/// A function `f: G → ℂ`, an element of the convolution algebra.
#[derive(Clone, Debug)]
pub struct AlgElement {
    group: Arc<GroupTable>,
    values: Vec<Complex64>,
}

impl AlgElement {
    pub fn new(group: Arc<GroupTable>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a group of order {}",
                values.len(),
                group.order()
            )));
        }
        Ok(Self { group, values })
    }

    pub fn zero(group: &Arc<GroupTable>) -> Self {
        Self {
            values: vec![Complex64::new(0.0, 0.0); group.order()],
            group: Arc::clone(group),
        }
    }

    /// The identity of the algebra: `|G|` at `e`, zero elsewhere.
    pub fn delta_e(group: &Arc<GroupTable>) -> Self {
        let mut f = Self::zero(group);
        f.values[group.identity()] = Complex64::new(group.order() as f64, 0.0);
        f
    }

    /// Point mass with value 1 at `t` (a coordinate basis vector).
    pub fn basis(group: &Arc<GroupTable>, t: usize) -> Self {
        let mut f = Self::zero(group);
        f.values[t] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn constant(group: &Arc<GroupTable>, value: Complex64) -> Self {
        Self {
            values: vec![value; group.order()],
            group: Arc::clone(group),
        }
    }

    /// Values i.i.d. complex standard normal.
    pub fn random<R: Rng + ?Sized>(group: &Arc<GroupTable>, rng: &mut R) -> Self {
        Self {
            values: complex_normal_vec(rng, group.order()),
            group: Arc::clone(group),
        }
    }

    pub fn group(&self) -> &Arc<GroupTable> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            group: Arc::clone(&self.group),
            values: self.values.iter().map(|x| x * s).collect(),
        }
    }

    /// Normalized L¹ norm `(1/|G|) Σ |f(t)|`.
    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|x| x.norm()).sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if same_group(&self.group, &other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                left: self.group.name().to_string(),
                right: other.group.name().to_string(),
            })
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(
            same_group(&self.group, &other.group),
            "elements of different groups: {} vs {}",
            self.group.name(),
            other.group.name()
        );
        Self {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    pub fn to_json(&self) -> AlgElementJson {
        AlgElementJson {
            group: self.group.name().to_string(),
            values: to_pairs(&self.values),
        }
    }

    pub fn from_json(json: &AlgElementJson, group: &Arc<GroupTable>) -> Result<Self> {
        if json.group != group.name() {
            return Err(Error::GroupMismatch {
                left: json.group.clone(),
                right: group.name().to_string(),
            });
        }
        Self::new(Arc::clone(group), from_pairs(&json.values))
    }
}

impl Add for &AlgElement {
    type Output = AlgElement;
    fn add(self, rhs: &AlgElement) -> AlgElement {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AlgElement {
    type Output = AlgElement;
    fn sub(self, rhs: &AlgElement) -> AlgElement {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<Complex64> for &AlgElement {
    type Output = AlgElement;
    fn mul(self, rhs: Complex64) -> AlgElement {
        self.scale(rhs)
    }
}

/// Wire format `{"group": name, "values": [[re, im], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgElementJson {
    pub group: String,
    pub values: Vec<[f64; 2]>,
}

/// `(f∗g)(t) = (1/|G|) Σ_s f(s) g(s⁻¹t)`.
pub fn convolve(f: &AlgElement, g: &AlgElement) -> Result<AlgElement> {
    f.check_same(g)?;
    Ok(AlgElement {
        group: Arc::clone(&f.group),
        values: convolve_values(&f.group, &f.values, &g.values),
    })
}

/// `f^{*n}`, with `f^{*1} = f`.
pub fn power(f: &AlgElement, n: usize) -> Result<AlgElement> {
    if n == 0 {
        return Err(Error::InvalidInput("convolution power needs n >= 1".into()));
    }
    let mut acc = f.clone();
    for _ in 1..n {
        acc = convolve(f, &acc)?;
    }
    Ok(acc)
}

/// Block-matrix side of the transform: one `d_π × d_π` block per registry irrep.
#[derive(Clone, Debug)]
pub struct FourierSide {
    pub blocks: Vec<CMatrix>,
}

impl FourierSide {
    pub fn zeros(registry: &IrrepRegistry) -> Self {
        Self {
            blocks: registry.irreps().iter().map(|r| CMatrix::zeros(r.dim, r.dim)).collect(),
        }
    }

    pub fn identity(registry: &IrrepRegistry) -> Self {
        Self {
            blocks: registry
                .irreps()
                .iter()
                .map(|r| CMatrix::identity(r.dim, r.dim))
                .collect(),
        }
    }

    /// Blocks multiplied pairwise in the given order.
    pub fn block_product(&self, other: &Self) -> Self {
        Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| crate::linalg::max_abs_diff(a, b))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self, registry: &IrrepRegistry) -> FourierSideJson {
        FourierSideJson {
            group: registry.group().name().to_string(),
            blocks: registry
                .irreps()
                .iter()
                .zip(&self.blocks)
                .map(|(irrep, block)| FourierBlockJson {
                    label: irrep.label.clone(),
                    dim: irrep.dim,
                    matrix: matrix_to_rows(block),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &FourierSideJson, registry: &IrrepRegistry) -> Result<Self> {
        let blocks = json
            .blocks
            .iter()
            .map(|b| {
                matrix_from_rows(&b.matrix)
                    .ok_or_else(|| Error::DimensionMismatch(format!("block {}: ragged", b.label)))
            })
            .collect::<Result<Vec<_>>>()?;
        let side = Self { blocks };
        check_blocks(&side, registry)?;
        Ok(side)
    }
}

/// Mirrors the registry: one `{"label", "dim", "matrix"}` entry per irrep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierSideJson {
    pub group: String,
    pub blocks: Vec<FourierBlockJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FourierBlockJson {
    pub label: String,
    pub dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn check_registry(f: &AlgElement, registry: &IrrepRegistry) -> Result<()> {
    if same_group(&f.group, registry.group()) {
        Ok(())
    } else {
        Err(Error::GroupMismatch {
            left: f.group.name().to_string(),
            right: registry.group().name().to_string(),
        })
    }
}

fn check_blocks(side: &FourierSide, registry: &IrrepRegistry) -> Result<()> {
    if side.blocks.len() != registry.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks for {} irreps",
            side.blocks.len(),
            registry.len()
        )));
    }
    for (b, irrep) in side.blocks.iter().zip(registry.irreps()) {
        if b.nrows() != irrep.dim || b.ncols() != irrep.dim {
            return Err(Error::DimensionMismatch(format!(
                "block for {} is {}x{}, expected {d}x{d}",
                irrep.label,
                b.nrows(),
                b.ncols(),
                d = irrep.dim
            )));
        }
    }
    Ok(())
}

/// `f̂(π) = (1/|G|) Σ_t f(t) U_π(t⁻¹)`.
pub fn fourier(f: &AlgElement, registry: &IrrepRegistry) -> Result<FourierSide> {
    check_registry(f, registry)?;
    let g = registry.group();
    let n = g.order() as f64;
    let blocks = registry
        .irreps()
        .iter()
        .map(|irrep| {
            let mut block = CMatrix::zeros(irrep.dim, irrep.dim);
            for (t, &ft) in f.values.iter().enumerate() {
                if ft != Complex64::new(0.0, 0.0) {
                    block += &irrep.matrices[g.inv(t)] * ft;
                }
            }
            block / Complex64::new(n, 0.0)
        })
        .collect();
    Ok(FourierSide { blocks })
}

/// `f(t) = Σ_π d_π trace(F(π) U_π(t))`.
pub fn inverse_fourier(side: &FourierSide, registry: &IrrepRegistry) -> Result<AlgElement> {
    registry.require_complete()?;
    check_blocks(side, registry)?;
    let g = registry.group();
    let values = (0..g.order())
        .map(|t| {
            registry
                .irreps()
                .iter()
                .zip(&side.blocks)
                .map(|(irrep, block)| {
                    // trace(F U) without forming the product
                    let u = &irrep.matrices[t];
                    let mut tr = Complex64::new(0.0, 0.0);
                    for i in 0..irrep.dim {
                        for k in 0..irrep.dim {
                            tr += block[(i, k)] * u[(k, i)];
                        }
                    }
                    tr * irrep.dim as f64
                })
                .sum()
        })
        .collect();
    Ok(AlgElement {
        group: Arc::clone(g),
        values,
    })
}

/// `e_π = d_π χ_π`, the identity of the minimal ideal attached to `π`.
pub fn central_idempotent(group: &Arc<GroupTable>, irrep: &Irrep) -> AlgElement {
    AlgElement {
        group: Arc::clone(group),
        values: irrep.character().into_iter().map(|x| x * irrep.dim as f64).collect(),
    }
}

pub fn central_idempotents(registry: &IrrepRegistry) -> Vec<AlgElement> {
    registry
        .irreps()
        .iter()
        .map(|irrep| central_idempotent(registry.group(), irrep))
        .collect()
}

/// Element of the ideal of `π` with Fourier block `block` at `π`, zero elsewhere.
pub fn embed_block(registry: &IrrepRegistry, index: usize, block: &CMatrix) -> Result<AlgElement> {
    let mut side = FourierSide::zeros(registry);
    side.blocks[index] = block.clone();
    inverse_fourier(&side, registry)
}

#[derive(Clone, Debug)]
pub struct Component {
    pub irrep: usize,
    pub label: String,
    pub element: AlgElement,
}

/// `f = Σ_π d_π f∗χ_π`; component `π` is `f∗e_π`.
pub fn decompose(f: &AlgElement, registry: &IrrepRegistry) -> Result<Vec<Component>> {
    check_registry(f, registry)?;
    registry.require_complete()?;
    registry
        .irreps()
        .iter()
        .enumerate()
        .map(|(i, irrep)| {
            let e = central_idempotent(registry.group(), irrep);
            Ok(Component {
                irrep: i,
                label: irrep.label.clone(),
                element: convolve(f, &e)?,
            })
        })
        .collect()
}

/// Norms on the group algebra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum BanachNorm {
    /// `((1/|G|) Σ |f|^p)^{1/p}`
    Lp(f64),
    Linf,
    /// Fourier algebra norm `Σ_π d_π ‖f̂(π)‖_{S¹}`.
    Ag,
    /// `‖f‖₁ + (Σ_π d_π ‖f̂(π)‖_{S^p}^p)^{1/p}`
    Sp(f64),
}

impl BanachNorm {
    pub const L1: Self = Self::Lp(1.0);

    pub fn label(&self) -> String {
        match self {
            Self::Lp(p) if *p == 1.0 => "l1".into(),
            Self::Lp(p) => format!("l{p}"),
            Self::Linf => "linf".into(),
            Self::Ag => "ag".into(),
            Self::Sp(p) => format!("sp{p}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let num = |t: &str| -> Result<f64> {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad norm {s}")))
        };
        Ok(match s.as_str() {
            "l1" => Self::L1,
            "linf" => Self::Linf,
            "ag" => Self::Ag,
            _ if s.starts_with("sp") => Self::Sp(num(&s[2..])?),
            _ if s.starts_with('l') => Self::Lp(num(&s[1..])?),
            _ => return Err(Error::InvalidInput(format!("unknown norm {s}"))),
        })
    }

    pub fn needs_registry(&self) -> bool {
        matches!(self, Self::Ag | Self::Sp(_))
    }
}

pub fn banach_norm(f: &AlgElement, which: BanachNorm, registry: &IrrepRegistry) -> Result<f64> {
    match which {
        BanachNorm::Lp(p) => lp_values(&f.values, p),
        BanachNorm::Linf => Ok(f.max_abs()),
        BanachNorm::Ag => {
            registry.require_complete()?;
            let side = fourier(f, registry)?;
            Ok(registry
                .irreps()
                .iter()
                .zip(&side.blocks)
                .map(|(irrep, b)| irrep.dim as f64 * schatten_norm(b, 1.0))
                .sum())
        }
        BanachNorm::Sp(p) => {
            check_exponent(p)?;
            registry.require_complete()?;
            let side = fourier(f, registry)?;
            let sum: f64 = registry
                .irreps()
                .iter()
                .zip(&side.blocks)
                .map(|(irrep, b)| irrep.dim as f64 * schatten_norm(b, p).powf(p))
                .sum();
            Ok(f.l1_norm() + sum.powf(1.0 / p))
        }
    }
}

/// Norm that needs no registry; `Ag`/`Sp` fall back to an error.
pub fn banach_norm_plain(f: &AlgElement, which: BanachNorm) -> Result<f64> {
    match which {
        BanachNorm::Lp(p) => lp_values(&f.values, p),
        BanachNorm::Linf => Ok(f.max_abs()),
        other => Err(Error::InvalidInput(format!(
            "norm {} needs an irrep registry",
            other.label()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_by_name;
    use crate::linalg::c;
    use crate::rng::seeded;

    fn elem(g: &Arc<GroupTable>, v: &[f64]) -> AlgElement {
        AlgElement::new(Arc::clone(g), v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn max_diff(a: &AlgElement, b: &AlgElement) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn z2_convolution_by_hand() {
        let (g, _) = builtin_by_name("z2").unwrap();
        let h = convolve(&elem(&g, &[1.0, 2.0]), &elem(&g, &[3.0, 4.0])).unwrap();
        assert_eq!(h.values(), &[c(5.5, 0.0), c(5.0, 0.0)]);
    }

    #[test]
    fn delta_is_identity() {
        let (g, _) = builtin_by_name("s3").unwrap();
        let mut rng = seeded(1);
        let f = AlgElement::random(&g, &mut rng);
        let d = AlgElement::delta_e(&g);
        assert!(max_diff(&convolve(&d, &f).unwrap(), &f) <= 4.0 * f64::EPSILON * f.max_abs());
        assert!(max_diff(&convolve(&f, &d).unwrap(), &f) <= 4.0 * f64::EPSILON * f.max_abs());
        assert_eq!(power(&d, 4).unwrap().values(), d.values());
        assert!((d.l1_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn z4_characters_are_orthogonal_idempotents() {
        let (g, r) = builtin_by_name("z4").unwrap();
        let chars: Vec<_> = r
            .irreps()
            .iter()
            .map(|i| AlgElement::new(Arc::clone(&g), i.character()).unwrap())
            .collect();
        for (j, a) in chars.iter().enumerate() {
            for (k, b) in chars.iter().enumerate() {
                let prod = convolve(a, b).unwrap();
                let expected = if j == k { b.clone() } else { AlgElement::zero(&g) };
                assert!(max_diff(&prod, &expected) < 1e-15);
            }
        }
    }

    #[test]
    fn constant_one_is_idempotent() {
        let (g, _) = builtin_by_name("z2").unwrap();
        let f = elem(&g, &[1.0, 1.0]);
        assert_eq!(power(&f, 2).unwrap().values(), f.values());
    }

    #[test]
    fn z2_fourier_by_hand() {
        let (g, r) = builtin_by_name("z2").unwrap();
        let side = fourier(&elem(&g, &[3.0, 5.0]), &r).unwrap();
        assert!((side.blocks[0][(0, 0)] - c(4.0, 0.0)).norm() < 1e-15);
        assert!((side.blocks[1][(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn transform_of_delta_and_back() {
        for name in ["s3", "q8", "d4"] {
            let (g, r) = builtin_by_name(name).unwrap();
            let side = fourier(&AlgElement::delta_e(&g), &r).unwrap();
            assert!(side.max_abs_diff(&FourierSide::identity(&r)) < 1e-14);
            let back = inverse_fourier(&FourierSide::identity(&r), &r).unwrap();
            assert!(max_diff(&back, &AlgElement::delta_e(&g)) < 1e-12);
        }
    }

    #[test]
    fn transform_reverses_products() {
        let (g, r) = builtin_by_name("s3").unwrap();
        let mut rng = seeded(7);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let f = AlgElement::random(&g, &mut rng);
            let h = AlgElement::random(&g, &mut rng);
            let lhs = fourier(&convolve(&f, &h).unwrap(), &r).unwrap();
            let rhs = fourier(&h, &r).unwrap().block_product(&fourier(&f, &r).unwrap());
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
        assert!(worst <= 1e-12, "{worst}");
    }

    #[test]
    fn single_block_inverse_is_central_idempotent() {
        let (g, r) = builtin_by_name("s3").unwrap();
        for (i, irrep) in r.irreps().iter().enumerate() {
            let e = embed_block(&r, i, &CMatrix::identity(irrep.dim, irrep.dim)).unwrap();
            assert!(max_diff(&e, &central_idempotent(&g, irrep)) < 1e-13);
        }
    }

    #[test]
    fn trivial_idempotent_is_constant_one() {
        let (g, r) = builtin_by_name("d4").unwrap();
        let e = central_idempotent(&g, &r.irreps()[0]);
        assert!(max_diff(&e, &AlgElement::constant(&g, c(1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn decomposition_of_delta() {
        let (g, r) = builtin_by_name("q8").unwrap();
        let parts = decompose(&AlgElement::delta_e(&g), &r).unwrap();
        let idem = central_idempotents(&r);
        for (p, e) in parts.iter().zip(&idem) {
            assert!(max_diff(&p.element, e) < 1e-13);
        }
        let e = &idem[4];
        let parts = decompose(e, &r).unwrap();
        for p in &parts {
            let expected = if p.irrep == 4 { e.clone() } else { AlgElement::zero(&g) };
            assert!(max_diff(&p.element, &expected) < 1e-13);
        }
    }

    #[test]
    fn incomplete_registry_is_rejected() {
        let (g, r) = builtin_by_name("s3").unwrap();
        let broken = r.with_irreps(r.irreps()[..2].to_vec()).unwrap();
        let f = AlgElement::delta_e(&g);
        assert!(matches!(decompose(&f, &broken), Err(Error::IncompleteRegistry { .. })));
        assert!(matches!(
            inverse_fourier(&FourierSide::identity(&broken), &broken),
            Err(Error::IncompleteRegistry { .. })
        ));
    }

    #[test]
    fn group_mismatch() {
        let (a, _) = builtin_by_name("z4").unwrap();
        let (b, _) = builtin_by_name("z2").unwrap();
        let err = convolve(&AlgElement::delta_e(&a), &AlgElement::delta_e(&b)).unwrap_err();
        assert!(matches!(err, Error::GroupMismatch { .. }));
    }

    #[test]
    fn norms_of_simple_elements() {
        let (g, r) = builtin_by_name("s3").unwrap();
        let d = AlgElement::delta_e(&g);
        assert!((banach_norm(&d, BanachNorm::L1, &r).unwrap() - 1.0).abs() < 1e-15);
        assert!((banach_norm(&d, BanachNorm::Ag, &r).unwrap() - 6.0).abs() < 1e-12);
        let one = AlgElement::constant(&g, c(1.0, 0.0));
        for p in [1.0, 1.5, 2.0, 7.0] {
            assert!((banach_norm(&one, BanachNorm::Lp(p), &r).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((banach_norm(&one, BanachNorm::Linf, &r).unwrap() - 1.0).abs() < 1e-15);
        // Sp norm of δ_e: ‖δ_e‖₁ + (Σ d_π · d_π)^{1/p} since every block is I
        let sp = banach_norm(&d, BanachNorm::Sp(2.0), &r).unwrap();
        assert!((sp - (1.0 + (1.0 + 1.0 + 2.0 * 2.0f64).sqrt())).abs() < 1e-12);
        assert!(matches!(
            banach_norm(&d, BanachNorm::Lp(0.9), &r),
            Err(Error::BadExponent(_))
        ));
    }

    #[test]
    fn norm_labels_parse_back() {
        for n in [
            BanachNorm::L1,
            BanachNorm::Lp(2.5),
            BanachNorm::Linf,
            BanachNorm::Ag,
            BanachNorm::Sp(3.0),
        ] {
            assert_eq!(BanachNorm::parse(&n.label()).unwrap(), n);
        }
    }
}

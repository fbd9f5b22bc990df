//! n-homogeneous polynomials on a finite-dimensional algebra and their
//! symmetric n-linear maps.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{product_residual, DomainDescriptor, FiniteAlgebra, MatrixAlgebra, SharedAlgebra};
use crate::error::{Error, Result};
use crate::fourier::{embed_block, AlgElement};
use crate::group::IrrepRegistry;
use crate::linalg::{random_unitary, vec_diff_norm2, vec_norm2, CMatrix};
use crate::rng::{complex_normal, complex_normal_vec, seeded};

pub const MIN_DEGREE: usize = 2;
pub const MAX_DEGREE: usize = 6;

/// Relative tolerance of the homogeneity probe.
pub const HOMOGENEITY_TOL: f64 = 1e-9;

/// Products of generated orthogonal pairs are below this fraction of ‖f‖‖g‖.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

pub(crate) fn check_degree(n: usize) -> Result<()> {
    if (MIN_DEGREE..=MAX_DEGREE).contains(&n) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange(n))
    }
}

/// Dense symmetric coefficient tensor, stored once per sorted multi-index.
///
/// `φ(x₁,…,x_n)_j = Σ_{i₁…i_n} T_{j,i₁…i_n} x₁[i₁]⋯x_n[i_n]` where the full
/// tensor is the symmetric extension of the stored entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor {
    degree: usize,
    dim: usize,
    codomain_dim: usize,
    entries: BTreeMap<(usize, Vec<usize>), Complex64>,
}

impl SymTensor {
    pub fn new(degree: usize, dim: usize, codomain_dim: usize) -> Result<Self> {
        check_degree(degree)?;
        Ok(Self {
            degree,
            dim,
            codomain_dim,
            entries: BTreeMap::new(),
        })
    }

    /// Sets the entry for the multiset `indices` (order irrelevant).
    pub fn set(&mut self, component: usize, indices: &[usize], value: Complex64) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::InvalidInput(format!(
                "multi-index of length {} for degree {}",
                indices.len(),
                self.degree
            )));
        }
        if component >= self.codomain_dim || indices.iter().any(|&i| i >= self.dim) {
            return Err(Error::InvalidInput("tensor index out of range".into()));
        }
        let mut key = indices.to_vec();
        key.sort_unstable();
        if value == Complex64::new(0.0, 0.0) {
            self.entries.remove(&(component, key));
        } else {
            self.entries.insert((component, key), value);
        }
        Ok(())
    }

    pub fn get(&self, component: usize, indices: &[usize]) -> Complex64 {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries
            .get(&(component, key))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, Vec<usize>), &Complex64)> {
        self.entries.iter()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn eval_multilinear(&self, args: &[&[Complex64]]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.codomain_dim];
        for ((j, key), &value) in &self.entries {
            let mut perm = key.clone();
            let mut acc = Complex64::new(0.0, 0.0);
            loop {
                acc += perm.iter().zip(args).map(|(&i, x)| x[i]).product::<Complex64>();
                if !next_permutation(&mut perm) {
                    break;
                }
            }
            out[*j] += value * acc;
        }
        out
    }

    pub fn eval_diagonal(&self, x: &[Complex64]) -> Vec<Complex64> {
        let args = vec![x; self.degree];
        self.eval_multilinear(&args)
    }
}

/// Lexicographic successor; false once the sequence is the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub type Evaluator = Arc<dyn Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync>;

#[derive(Clone)]
pub enum PolyForm {
    Tensor(SymTensor),
    BlackBox(Evaluator),
}

impl fmt::Debug for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Tensor(t) => f.debug_tuple("Tensor").field(&t.entries.len()).finish(),
            Self::BlackBox(_) => f.write_str("BlackBox"),
        }
    }
}

/// An n-homogeneous polynomial `A → ℂ^m`.
#[derive(Clone, Debug)]
pub struct HomPoly {
    degree: usize,
    algebra: SharedAlgebra,
    codomain_dim: usize,
    form: PolyForm,
}

impl HomPoly {
    pub fn from_tensor(algebra: SharedAlgebra, tensor: SymTensor) -> Result<Self> {
        if tensor.dim != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "tensor over dimension {} for an algebra of dimension {}",
                tensor.dim,
                algebra.dim()
            )));
        }
        Ok(Self {
            degree: tensor.degree,
            codomain_dim: tensor.codomain_dim,
            algebra,
            form: PolyForm::Tensor(tensor),
        })
    }

    /// Wraps an evaluator that claims degree-`degree` homogeneity. The claim
    /// is probed by [`polarize`], not trusted.
    pub fn black_box<F>(algebra: SharedAlgebra, degree: usize, codomain_dim: usize, eval: F) -> Result<Self>
    where
        F: Fn(&[Complex64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        check_degree(degree)?;
        Ok(Self {
            degree,
            algebra,
            codomain_dim,
            form: PolyForm::BlackBox(Arc::new(eval)),
        })
    }

    /// `x ↦ φ(x, …, x)`.
    pub fn from_multilinear(phi: &SymMultilinear) -> Self {
        let phi2 = phi.clone();
        Self {
            degree: phi.degree,
            algebra: Arc::clone(&phi.algebra),
            codomain_dim: phi.codomain_dim,
            form: PolyForm::BlackBox(Arc::new(move |x: &[Complex64]| {
                let args = vec![x; phi2.degree];
                phi2.eval(&args)
            })),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn algebra(&self) -> &SharedAlgebra {
        &self.algebra
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn form(&self) -> &PolyForm {
        &self.form
    }

    pub fn domain(&self) -> DomainDescriptor {
        self.algebra.descriptor()
    }

    pub fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.form {
            PolyForm::Tensor(t) => t.eval_diagonal(x),
            PolyForm::BlackBox(f) => f(x),
        }
    }

    /// `λ·P`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let inner = self.clone();
        Self {
            form: PolyForm::BlackBox(Arc::new(move |x: &[Complex64]| {
                inner.eval(x).into_iter().map(|v| v * lambda).collect()
            })),
            ..self.clone()
        }
    }

    /// Worst relative residual of `P(λf) = λⁿ P(f)` over random probes.
    pub fn homogeneity_residual(&self, probes: usize, seed: u64) -> f64 {
        let mut rng = seeded(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let x = complex_normal_vec(&mut rng, self.algebra.dim());
            let lambda = complex_normal(&mut rng) * 2.0;
            let scaled: Vec<_> = x.iter().map(|v| v * lambda).collect();
            let lhs = self.eval(&scaled);
            let rhs: Vec<_> = self
                .eval(&x)
                .into_iter()
                .map(|v| v * lambda.powu(self.degree as u32))
                .collect();
            let residual = vec_diff_norm2(&lhs, &rhs) / vec_norm2(&rhs).max(1.0);
            worst = worst.max(residual);
        }
        worst
    }
}

#[derive(Clone, Debug)]
enum MultiForm {
    Tensor(SymTensor),
    Polarized(HomPoly),
}

/// A symmetric n-linear map `Aⁿ → ℂ^m`.
#[derive(Clone, Debug)]
pub struct SymMultilinear {
    degree: usize,
    algebra: SharedAlgebra,
    codomain_dim: usize,
    form: MultiForm,
}

impl SymMultilinear {
    pub fn from_tensor(algebra: SharedAlgebra, tensor: SymTensor) -> Result<Self> {
        if tensor.dim != algebra.dim() {
            return Err(Error::DimensionMismatch("tensor dimension".into()));
        }
        Ok(Self {
            degree: tensor.degree,
            codomain_dim: tensor.codomain_dim,
            algebra,
            form: MultiForm::Tensor(tensor),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn algebra(&self) -> &SharedAlgebra {
        &self.algebra
    }

    pub fn eval(&self, args: &[&[Complex64]]) -> Vec<Complex64> {
        assert_eq!(args.len(), self.degree, "wrong number of arguments");
        match &self.form {
            MultiForm::Tensor(t) => t.eval_multilinear(args),
            MultiForm::Polarized(p) => polarization_sum(p, args),
        }
    }
}

/// `φ(x₁,…,x_n) = 1/(n! 2ⁿ) Σ_{ε∈{±1}ⁿ} ε₁⋯ε_n P(ε₁x₁+⋯+ε_nx_n)`.
fn polarization_sum(p: &HomPoly, args: &[&[Complex64]]) -> Vec<Complex64> {
    let n = args.len();
    let dim = p.algebra.dim();
    let mut out = vec![Complex64::new(0.0, 0.0); p.codomain_dim];
    let mut point = vec![Complex64::new(0.0, 0.0); dim];
    for mask in 0u32..(1 << n) {
        point.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut sign = 1.0;
        for (l, x) in args.iter().enumerate() {
            let eps = if mask & (1 << l) == 0 { 1.0 } else { -1.0 };
            sign *= eps;
            point.iter_mut().zip(x.iter()).for_each(|(acc, v)| *acc += v * eps);
        }
        for (o, v) in out.iter_mut().zip(p.eval(&point)) {
            *o += v * sign;
        }
    }
    let norm = (factorial(n) * (1u64 << n)) as f64;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

#[derive(Clone, Copy, Debug)]
pub struct PolarizeOptions {
    pub probes: usize,
    pub seed: u64,
}

impl Default for PolarizeOptions {
    fn default() -> Self {
        Self {
            probes: 8,
            seed: 0x5eed_0001,
        }
    }
}

pub fn polarize(p: &HomPoly) -> Result<SymMultilinear> {
    polarize_with(p, &PolarizeOptions::default())
}

/// Symmetric n-linear map of `p` through the polarization formula, after a
/// homogeneity probe.
pub fn polarize_with(p: &HomPoly, opts: &PolarizeOptions) -> Result<SymMultilinear> {
    let residual = p.homogeneity_residual(opts.probes, opts.seed);
    if residual > HOMOGENEITY_TOL {
        return Err(Error::HomogeneityViolation {
            degree: p.degree,
            residual,
        });
    }
    Ok(SymMultilinear {
        degree: p.degree,
        algebra: Arc::clone(&p.algebra),
        codomain_dim: p.codomain_dim,
        form: MultiForm::Polarized(p.clone()),
    })
}

/// `S_n(a₁,…,a_n) = (1/n!) Σ_σ a_{σ(1)}⋯a_{σ(n)}`.
pub fn sym_product(alg: &dyn FiniteAlgebra, args: &[&[Complex64]]) -> Vec<Complex64> {
    let n = args.len();
    assert!(n >= 1, "sym_product needs at least one factor");
    let mut out = vec![Complex64::new(0.0, 0.0); alg.dim()];
    for perm in (0..n).permutations(n) {
        let mut acc = args[perm[0]].to_vec();
        for &i in &perm[1..] {
            acc = alg.multiply(&acc, args[i]);
        }
        out.iter_mut().zip(&acc).for_each(|(o, v)| *o += v);
    }
    let scale = 1.0 / factorial(n) as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// [`sym_product`] over group-algebra elements.
pub fn sym_product_elements(args: &[AlgElement]) -> Result<AlgElement> {
    let first = args
        .first()
        .ok_or_else(|| Error::InvalidInput("sym_product needs at least one factor".into()))?;
    for a in &args[1..] {
        first.check_same(a)?;
    }
    let alg = crate::algebra::GroupAlgebra::new(Arc::clone(first.group()));
    let slices: Vec<&[Complex64]> = args.iter().map(|a| a.values()).collect();
    AlgElement::new(Arc::clone(first.group()), sym_product(&alg, &slices))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// `(f, 0)`
    Zero,
    /// `(e_π, e_π')`, distinct central idempotents.
    Idempotents,
    /// Complementary diagonal projections in one block, no conjugation.
    CanonicalSplit,
    /// Blocks wholly assigned to one side.
    CrossIdeal,
    /// One block split by complementary subspaces after a random unitary change of basis.
    WithinBlock,
}

#[derive(Clone, Debug)]
pub struct OrthogonalPair {
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    pub kind: PairKind,
}

/// Which structured pairs to generate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSuite {
    /// Cross-ideal and within-block pairs, 50/50.
    Full,
    /// Only pairs supported on distinct ideals.
    CrossIdeal,
}

#[derive(Clone, Copy, Debug)]
pub enum PairDomain<'a> {
    Group(&'a IrrepRegistry),
    Matrix(usize),
}

/// Deterministic pairs first (zero pair, idempotent pairs, canonical
/// splits), then seeded random pairs, `count` in total. Every pair is
/// re-checked so that both products vanish.
pub fn orthogonal_pairs(
    domain: PairDomain<'_>,
    count: usize,
    seed: u64,
    suite: PairSuite,
) -> Result<Vec<OrthogonalPair>> {
    let mut rng = seeded(seed);
    let mut pairs = Vec::with_capacity(count);
    match domain {
        PairDomain::Group(registry) => {
            registry.require_complete()?;
            let alg = crate::algebra::GroupAlgebra::new(Arc::clone(registry.group()));
            let blocks = BlockModel::group(registry);
            let mut fixed = blocks.deterministic(&mut rng, suite)?;
            fixed.truncate(count);
            pairs.extend(fixed);
            fill_random(&mut pairs, count, &mut rng, suite, &alg, &blocks)?;
        }
        PairDomain::Matrix(k) => {
            let alg = MatrixAlgebra::new(k);
            let blocks = BlockModel::Matrix(alg);
            let mut fixed = blocks.deterministic(&mut rng, suite)?;
            fixed.truncate(count);
            pairs.extend(fixed);
            fill_random(&mut pairs, count, &mut rng, suite, &alg, &blocks)?;
        }
    }
    Ok(pairs)
}

fn fill_random<R: Rng>(
    pairs: &mut Vec<OrthogonalPair>,
    count: usize,
    rng: &mut R,
    suite: PairSuite,
    alg: &dyn FiniteAlgebra,
    blocks: &BlockModel<'_>,
) -> Result<()> {
    let mut attempts = 0;
    while pairs.len() < count {
        attempts += 1;
        if attempts > 20 * count + 100 {
            return Err(Error::InvalidInput(
                "could not generate orthogonal pairs within tolerance".into(),
            ));
        }
        let within = suite == PairSuite::Full && blocks.has_splittable() && rng.random_bool(0.5);
        let pair = blocks.random_pair(rng, within)?;
        if product_residual(alg, &pair.f, &pair.g) <= ORTHOGONALITY_TOL {
            pairs.push(pair);
        }
    }
    Ok(())
}

/// Block-diagonal picture of the algebra: ℂ[G] ≅ ⊕_π 𝕄_{d_π} through the
/// Fourier transform, or a single 𝕄_k.
enum BlockModel<'a> {
    Group(&'a IrrepRegistry),
    Matrix(MatrixAlgebra),
}

impl<'a> BlockModel<'a> {
    fn group(registry: &'a IrrepRegistry) -> Self {
        Self::Group(registry)
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            Self::Group(r) => r.dims(),
            Self::Matrix(m) => vec![m.k()],
        }
    }

    fn has_splittable(&self) -> bool {
        self.dims().iter().any(|&d| d >= 2)
    }

    fn assemble(&self, blocks: &[CMatrix]) -> Result<Vec<Complex64>> {
        match self {
            Self::Group(r) => {
                let mut acc = vec![Complex64::new(0.0, 0.0); r.group().order()];
                for (i, b) in blocks.iter().enumerate() {
                    if b.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
                        continue;
                    }
                    let part = embed_block(r, i, b)?;
                    acc.iter_mut().zip(part.values()).for_each(|(a, v)| *a += v);
                }
                Ok(acc)
            }
            Self::Matrix(m) => Ok(m.from_matrix(&blocks[0])),
        }
    }

    fn deterministic<R: Rng>(&self, rng: &mut R, _suite: PairSuite) -> Result<Vec<OrthogonalPair>> {
        let dims = self.dims();
        let mut out = Vec::new();
        let zeros: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
        let random_blocks: Vec<CMatrix> = dims
            .iter()
            .map(|&d| CMatrix::from_fn(d, d, |_, _| complex_normal(rng)))
            .collect();
        out.push(OrthogonalPair {
            f: self.assemble(&random_blocks)?,
            g: self.assemble(&zeros)?,
            kind: PairKind::Zero,
        });
        for i in 0..dims.len() {
            for j in i + 1..dims.len() {
                let mut fb = zeros.clone();
                let mut gb = zeros.clone();
                fb[i] = CMatrix::identity(dims[i], dims[i]);
                gb[j] = CMatrix::identity(dims[j], dims[j]);
                out.push(OrthogonalPair {
                    f: self.assemble(&fb)?,
                    g: self.assemble(&gb)?,
                    kind: PairKind::Idempotents,
                });
            }
        }
        // Complementary diagonal projections are orthogonal in any suite; they
        // only exist inside blocks of size ≥ 2, so they belong to the
        // within-block family and are kept for the full suite only.
        if _suite == PairSuite::Full {
            for (i, &d) in dims.iter().enumerate().filter(|(_, &d)| d >= 2) {
                let mut fb = zeros.clone();
                let mut gb = zeros.clone();
                fb[i][(0, 0)] = Complex64::new(1.0, 0.0);
                for k in 1..d {
                    gb[i][(k, k)] = Complex64::new(1.0, 0.0);
                }
                out.push(OrthogonalPair {
                    f: self.assemble(&fb)?,
                    g: self.assemble(&gb)?,
                    kind: PairKind::CanonicalSplit,
                });
            }
        }
        Ok(out)
    }

    fn random_pair<R: Rng>(&self, rng: &mut R, within: bool) -> Result<OrthogonalPair> {
        let dims = self.dims();
        let mut fb: Vec<CMatrix> = dims.iter().map(|&d| CMatrix::zeros(d, d)).collect();
        let mut gb = fb.clone();
        let gaussian = |rng: &mut R, d: usize| CMatrix::from_fn(d, d, |_, _| complex_normal(rng));

        let split_block = if within {
            let candidates: Vec<usize> = (0..dims.len()).filter(|&i| dims[i] >= 2).collect();
            Some(candidates[rng.random_range(0..candidates.len())])
        } else {
            None
        };

        // whole-block assignment: 0 → f, 1 → g, 2 → neither
        let mut sides: Vec<u8> = (0..dims.len()).map(|_| rng.random_range(0..3u8)).collect();
        if split_block.is_none() && dims.len() >= 2 {
            // make sure both sides are non-trivial
            let a = rng.random_range(0..dims.len());
            let mut b = rng.random_range(0..dims.len() - 1);
            if b >= a {
                b += 1;
            }
            sides[a] = 0;
            sides[b] = 1;
        }
        for (i, &d) in dims.iter().enumerate() {
            if Some(i) == split_block {
                let u = random_unitary(rng, d);
                let cut = rng.random_range(1..d);
                let mut x = CMatrix::zeros(d, d);
                let mut y = CMatrix::zeros(d, d);
                for r in 0..d {
                    for c in 0..d {
                        if r < cut && c < cut {
                            x[(r, c)] = complex_normal(rng);
                        } else if r >= cut && c >= cut {
                            y[(r, c)] = complex_normal(rng);
                        }
                    }
                }
                fb[i] = &u * x * u.adjoint();
                gb[i] = &u * y * u.adjoint();
            } else {
                match sides[i] {
                    0 => fb[i] = gaussian(rng, d),
                    1 => gb[i] = gaussian(rng, d),
                    _ => {}
                }
            }
        }
        if dims.len() == 1 && split_block.is_none() {
            // a single block that cannot be split: only (x, 0) is orthogonal
            gb[0] = CMatrix::zeros(dims[0], dims[0]);
            fb[0] = gaussian(rng, dims[0]);
        }
        Ok(OrthogonalPair {
            f: self.assemble(&fb)?,
            g: self.assemble(&gb)?,
            kind: if split_block.is_some() {
                PairKind::WithinBlock
            } else {
                PairKind::CrossIdeal
            },
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub kind: PairKind,
    pub f: Vec<Complex64>,
    pub g: Vec<Complex64>,
    /// ‖P(f+g) − P(f) − P(g)‖
    pub residual: f64,
    /// residual / (1 + ‖P(f)‖ + ‖P(g)‖)
    pub relative: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum OaddOutcome {
    Pass { pairs: usize, max_relative: f64 },
    Counterexample(Counterexample),
}

impl OaddOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, Self::Pass { .. })
    }
}

/// Passes iff `‖P(f+g) − P(f) − P(g)‖ ≤ tol·(1 + ‖P(f)‖ + ‖P(g)‖)` on every
/// pair; otherwise reports the pair with the largest relative violation.
pub fn check_orthogonal_additivity(p: &HomPoly, pairs: &[OrthogonalPair], tol: f64) -> Result<OaddOutcome> {
    let alg = p.algebra.as_ref();
    for (index, pair) in pairs.iter().enumerate() {
        if pair.f.len() != alg.dim() || pair.g.len() != alg.dim() {
            return Err(Error::DimensionMismatch(format!("pair {index} has the wrong length")));
        }
        let residual = product_residual(alg, &pair.f, &pair.g);
        if residual > ORTHOGONALITY_TOL {
            return Err(Error::NotOrthogonal { index, residual });
        }
    }
    let mut worst: Option<Counterexample> = None;
    let mut max_relative: f64 = 0.0;
    for (index, pair) in pairs.iter().enumerate() {
        let sum: Vec<_> = pair.f.iter().zip(&pair.g).map(|(a, b)| a + b).collect();
        let pf = p.eval(&pair.f);
        let pg = p.eval(&pair.g);
        let psum = p.eval(&sum);
        let defect: Vec<_> = psum.iter().zip(&pf).zip(&pg).map(|((s, a), b)| s - a - b).collect();
        let residual = vec_norm2(&defect);
        let relative = residual / (1.0 + vec_norm2(&pf) + vec_norm2(&pg));
        max_relative = max_relative.max(relative);
        if relative > tol && worst.as_ref().is_none_or(|w| relative > w.relative) {
            worst = Some(Counterexample {
                index,
                kind: pair.kind,
                f: pair.f.clone(),
                g: pair.g.clone(),
                residual,
                relative,
            });
        }
    }
    Ok(match worst {
        Some(c) => OaddOutcome::Counterexample(c),
        None => OaddOutcome::Pass {
            pairs: pairs.len(),
            max_relative,
        },
    })
}

/// Wire format: `{"degree", "domain", "codomain_dim", "tensor"}`.
///
/// Tensor keys are sorted multi-indices `"i1,i2,…,in"`, prefixed by
/// `"j:"` for codomain component `j > 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolynomialFile {
    pub degree: usize,
    pub domain: DomainDescriptor,
    pub codomain_dim: usize,
    pub tensor: BTreeMap<String, [f64; 2]>,
}

impl PolynomialFile {
    pub fn from_tensor(domain: DomainDescriptor, tensor: &SymTensor) -> Self {
        let entries = tensor
            .entries()
            .map(|((j, idx), v)| {
                let key = idx.iter().map(|i| i.to_string()).join(",");
                let key = if *j == 0 { key } else { format!("{j}:{key}") };
                (key, [v.re, v.im])
            })
            .collect();
        Self {
            degree: tensor.degree,
            domain,
            codomain_dim: tensor.codomain_dim,
            tensor: entries,
        }
    }

    pub fn to_tensor(&self) -> Result<SymTensor> {
        let mut t = SymTensor::new(self.degree, self.domain.dim(), self.codomain_dim)?;
        for (key, v) in &self.tensor {
            let (component, idx) = match key.split_once(':') {
                Some((j, rest)) => (
                    j.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidInput(format!("bad tensor key {key}")))?,
                    rest,
                ),
                None => (0, key.as_str()),
            };
            let indices = idx
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidInput(format!("bad tensor key {key}")))?;
            t.set(component, &indices, Complex64::new(v[0], v[1]))?;
        }
        Ok(t)
    }

    /// Binds the file to a concrete algebra, which must match the declared domain.
    pub fn into_poly(self, algebra: SharedAlgebra) -> Result<HomPoly> {
        if algebra.descriptor() != self.domain {
            return Err(Error::InvalidInput(format!(
                "polynomial declared over {} but bound to {}",
                self.domain,
                algebra.descriptor()
            )));
        }
        HomPoly::from_tensor(algebra, self.to_tensor()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GroupAlgebra;
    use crate::fourier::{central_idempotents, fourier};
    use crate::group::builtin_by_name;
    use crate::linalg::c;

    fn scalar_algebra() -> SharedAlgebra {
        Arc::new(MatrixAlgebra::new(1))
    }

    fn trace_square(k: usize) -> HomPoly {
        let alg = MatrixAlgebra::new(k);
        let mut t = SymTensor::new(2, k * k, 1).unwrap();
        for i in 0..k {
            for j in 0..k {
                t.set(0, &[i * k + j, j * k + i], c(1.0, 0.0)).unwrap();
            }
        }
        HomPoly::from_tensor(Arc::new(alg), t).unwrap()
    }

    fn trace_then_square(k: usize) -> HomPoly {
        HomPoly::black_box(Arc::new(MatrixAlgebra::new(k)), 2, 1, move |x| {
            let tr: Complex64 = (0..k).map(|i| x[i * k + i]).sum();
            vec![tr * tr]
        })
        .unwrap()
    }

    #[test]
    fn square_on_scalars_polarizes_to_product() {
        let p = HomPoly::black_box(scalar_algebra(), 2, 1, |x| vec![x[0] * x[0]]).unwrap();
        let phi = polarize(&p).unwrap();
        let one = [c(1.0, 0.0)];
        let two = [c(2.0, 0.0)];
        let three = [c(3.0, 0.0)];
        assert!((phi.eval(&[&one, &one])[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((phi.eval(&[&two, &three])[0] - c(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_on_scalars() {
        let p = HomPoly::black_box(scalar_algebra(), 3, 1, |x| vec![x[0] * x[0] * x[0]]).unwrap();
        let phi = polarize(&p).unwrap();
        let one = [c(1.0, 0.0)];
        let two = [c(2.0, 0.0)];
        assert!((phi.eval(&[&one, &one, &one])[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((phi.eval(&[&one, &one, &two])[0] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn trace_square_polarizes_to_trace_product() {
        let p = trace_square(2);
        let phi = polarize(&p).unwrap();
        let m = MatrixAlgebra::new(2);
        let e = |i, j| m.unit_matrix(i, j);
        let val = |a: &[Complex64], b: &[Complex64]| phi.eval(&[a, b])[0];
        assert!((val(&e(0, 0), &e(0, 0)) - c(1.0, 0.0)).norm() < 1e-14);
        assert!((val(&e(0, 1), &e(1, 0)) - c(1.0, 0.0)).norm() < 1e-14);
        assert!(val(&e(0, 0), &e(1, 1)).norm() < 1e-14);
    }

    #[test]
    fn non_homogeneous_black_box_is_rejected() {
        let p = HomPoly::black_box(scalar_algebra(), 2, 1, |x| vec![x[0] * x[0] + x[0]]).unwrap();
        assert!(matches!(polarize(&p), Err(Error::HomogeneityViolation { .. })));
    }

    #[test]
    fn degree_cap() {
        assert!(matches!(
            HomPoly::black_box(scalar_algebra(), 7, 1, |x| vec![x[0]]),
            Err(Error::DegreeOutOfRange(7))
        ));
        assert!(SymTensor::new(1, 2, 1).is_err());
    }

    #[test]
    fn polarization_matches_tensor_form() {
        // random symmetric cubic tensor over a 4-dim algebra
        let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(2));
        let mut rng = seeded(11);
        let mut t = SymTensor::new(3, 4, 2).unwrap();
        for j in 0..2 {
            for idx in (0..4).combinations_with_replacement(3) {
                t.set(j, &idx, complex_normal(&mut rng)).unwrap();
            }
        }
        let exact = SymMultilinear::from_tensor(Arc::clone(&alg), t.clone()).unwrap();
        let p = HomPoly::from_tensor(Arc::clone(&alg), t).unwrap();
        let polarized = polarize(&p).unwrap();
        // rebuilding P from φ and polarizing again changes nothing
        let rebuilt = polarize(&HomPoly::from_multilinear(&polarized)).unwrap();
        for _ in 0..20 {
            let xs: Vec<Vec<Complex64>> = (0..3).map(|_| complex_normal_vec(&mut rng, 4)).collect();
            let args: Vec<&[Complex64]> = xs.iter().map(|v| v.as_slice()).collect();
            let a = exact.eval(&args);
            let b = polarized.eval(&args);
            let c2 = rebuilt.eval(&args);
            assert!(vec_diff_norm2(&a, &b) <= 1e-9 * vec_norm2(&a).max(1.0));
            assert!(vec_diff_norm2(&a, &c2) <= 1e-9 * vec_norm2(&a).max(1.0));
            // symmetry under a transposition
            let swapped = [args[1], args[0], args[2]];
            assert!(vec_diff_norm2(&b, &polarized.eval(&swapped)) <= 1e-12 * vec_norm2(&b).max(1.0));
        }
    }

    #[test]
    fn sym_product_examples() {
        let m = MatrixAlgebra::new(2);
        let s = sym_product(&m, &[&m.unit_matrix(0, 1), &m.unit_matrix(1, 0)]);
        let expected: Vec<_> = [0.5, 0.0, 0.0, 0.5].iter().map(|&x| c(x, 0.0)).collect();
        assert!(vec_diff_norm2(&s, &expected) < 1e-15);

        let (g, _) = builtin_by_name("s3").unwrap();
        let mut rng = seeded(2);
        let a = AlgElement::random(&g, &mut rng);
        let d = AlgElement::delta_e(&g);
        let s = sym_product_elements(&[d.clone(), d.clone(), a.clone()]).unwrap();
        assert!((&s - &a).max_abs() < 1e-13);
        let s = sym_product_elements(&[a.clone(), a.clone(), a.clone()]).unwrap();
        assert!((&s - &crate::fourier::power(&a, 3).unwrap()).max_abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pair_examples() {
        let m = MatrixAlgebra::new(2);
        assert_eq!(product_residual(&m, &m.unit_matrix(0, 0), &m.unit_matrix(1, 1)), 0.0);
        let (_, r) = builtin_by_name("d4").unwrap();
        let idem = central_idempotents(&r);
        let alg = GroupAlgebra::new(Arc::clone(r.group()));
        for i in 0..idem.len() {
            for j in 0..idem.len() {
                if i != j {
                    assert!(product_residual(&alg, idem[i].values(), idem[j].values()) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn generated_pairs_are_orthogonal_and_mixed() {
        let (_, r) = builtin_by_name("s3").unwrap();
        let alg = GroupAlgebra::new(Arc::clone(r.group()));
        let pairs = orthogonal_pairs(PairDomain::Group(&r), 200, 5, PairSuite::Full).unwrap();
        assert_eq!(pairs.len(), 200);
        assert_eq!(pairs[0].kind, PairKind::Zero);
        for p in &pairs {
            assert!(product_residual(&alg, &p.f, &p.g) <= ORTHOGONALITY_TOL);
        }
        let within = pairs.iter().filter(|p| p.kind == PairKind::WithinBlock).count();
        let cross = pairs.iter().filter(|p| p.kind == PairKind::CrossIdeal).count();
        assert!(within > 60 && cross > 60, "within {within}, cross {cross}");

        let cross_only = orthogonal_pairs(PairDomain::Group(&r), 50, 5, PairSuite::CrossIdeal).unwrap();
        assert!(cross_only
            .iter()
            .all(|p| !matches!(p.kind, PairKind::WithinBlock | PairKind::CanonicalSplit)));

        let mats = orthogonal_pairs(PairDomain::Matrix(3), 40, 9, PairSuite::Full).unwrap();
        for p in &mats {
            assert!(product_residual(&MatrixAlgebra::new(3), &p.f, &p.g) <= ORTHOGONALITY_TOL);
        }
    }

    #[test]
    fn pairs_are_reproducible() {
        let (_, r) = builtin_by_name("q8").unwrap();
        let a = orthogonal_pairs(PairDomain::Group(&r), 30, 77, PairSuite::Full).unwrap();
        let b = orthogonal_pairs(PairDomain::Group(&r), 30, 77, PairSuite::Full).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.f == y.f && x.g == y.g));
    }

    #[test]
    fn trace_square_is_orthogonally_additive() {
        let p = trace_square(2);
        let m = MatrixAlgebra::new(2);
        let pairs = vec![OrthogonalPair {
            f: m.unit_matrix(0, 0),
            g: m.unit_matrix(1, 1),
            kind: PairKind::CanonicalSplit,
        }];
        assert!(check_orthogonal_additivity(&p, &pairs, 1e-9).unwrap().passed());
        let generated = orthogonal_pairs(PairDomain::Matrix(2), 100, 3, PairSuite::Full).unwrap();
        assert!(check_orthogonal_additivity(&p, &generated, 1e-9).unwrap().passed());
    }

    #[test]
    fn trace_then_square_fails_with_residual_two() {
        let p = trace_then_square(2);
        let m = MatrixAlgebra::new(2);
        let pairs = vec![OrthogonalPair {
            f: m.unit_matrix(0, 0),
            g: m.unit_matrix(1, 1),
            kind: PairKind::CanonicalSplit,
        }];
        match check_orthogonal_additivity(&p, &pairs, 1e-9).unwrap() {
            OaddOutcome::Counterexample(c) => assert!((c.residual - 2.0).abs() < 1e-14),
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }

    #[test]
    fn prototypical_polynomial_passes_on_s3() {
        let (g, r) = builtin_by_name("s3").unwrap();
        let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
        let mut rng = seeded(21);
        let weights = complex_normal_vec(&mut rng, 6);
        let alg2 = Arc::clone(&alg);
        let p = HomPoly::black_box(Arc::clone(&alg), 3, 1, move |x| {
            let cube = crate::algebra::power(alg2.as_ref(), x, 3);
            vec![cube.iter().zip(&weights).map(|(a, w)| a * w).sum()]
        })
        .unwrap();
        let pairs = orthogonal_pairs(PairDomain::Group(&r), 500, 8, PairSuite::Full).unwrap();
        assert!(check_orthogonal_additivity(&p, &pairs, 1e-9).unwrap().passed());
    }

    #[test]
    fn non_orthogonal_pair_is_rejected() {
        let p = trace_square(2);
        let m = MatrixAlgebra::new(2);
        let pairs = vec![OrthogonalPair {
            f: m.unit_matrix(0, 1),
            g: m.unit_matrix(1, 0),
            kind: PairKind::CrossIdeal,
        }];
        assert!(matches!(
            check_orthogonal_additivity(&p, &pairs, 1e-9),
            Err(Error::NotOrthogonal { index: 0, .. })
        ));
    }

    #[test]
    fn polynomial_file_round_trip() {
        let p = trace_square(2);
        let PolyForm::Tensor(t) = p.form() else { unreachable!() };
        let file = PolynomialFile::from_tensor(p.domain(), t);
        assert_eq!(file.tensor.len(), 3);
        assert!(file.tensor.contains_key("1,2"));
        let text = serde_json::to_string(&file).unwrap();
        let back: PolynomialFile = serde_json::from_str(&text).unwrap();
        assert_eq!(&back.to_tensor().unwrap(), t);
    }

    #[test]
    fn fourier_block_trace_square_is_symmetric_tensor() {
        // Σ_π trace(f̂(π)²) written as a tensor over ℂ[S3] agrees with the
        // Fourier-side evaluation.
        let (g, r) = builtin_by_name("s3").unwrap();
        let alg = GroupAlgebra::new(Arc::clone(&g));
        let t = crate::represent::fourier_trace_power_tensor(&r, 2).unwrap();
        let p = HomPoly::from_tensor(Arc::new(alg), t).unwrap();
        let mut rng = seeded(4);
        let f = AlgElement::random(&g, &mut rng);
        let side = fourier(&f, &r).unwrap();
        let direct: Complex64 = side.blocks.iter().map(|b| (b * b).trace()).sum();
        assert!((p.eval(f.values())[0] - direct).norm() < 1e-12);
    }
}

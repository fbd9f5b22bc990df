//! The representing linear map Φ with `P(f) = Φ(fⁿ)`.
//!
//! Two independent extraction paths: on 𝕄_k, `Φ(a) = φ(a, I, …, I)`; on
//! ℂ[G], `Φ(f) = Σ_π φ(f∗e_π, e_π, …, e_π)`. The group path can also be
//! assembled block by block from the matrix path through the Fourier
//! isomorphism of each minimal ideal with 𝕄_{d_π}.

use std::sync::Arc;

use itertools::Itertools;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{power, DomainDescriptor, DomainNorm, FiniteAlgebra, GroupAlgebra, MatrixAlgebra, SharedAlgebra};
use crate::error::{Error, Result};
use crate::fourier::{central_idempotents, embed_block, fourier, AlgElement};
use crate::group::{GroupTable, IrrepRegistry};
use crate::linalg::{matrix_from_rows, matrix_to_rows, numerical_rank, vec_diff_norm2, vec_norm2, CMatrix};
use crate::polynomials::{
    check_orthogonal_additivity, factorial, orthogonal_pairs, polarize, HomPoly, OaddOutcome, PairDomain, PairSuite,
    SymTensor,
};
use crate::rng::{complex_normal, complex_normal_vec, seeded, split};

/// Probe count used after every extraction.
pub const DEFAULT_PROBES: usize = 200;
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;
const VERIFY_SEED: u64 = 0x0a11_ce5e_ed00;

/// A linear map `A → ℂ^m` as an `m × dim A` matrix over the domain basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    pub domain: DomainDescriptor,
    pub matrix: CMatrix,
}

impl LinearMap {
    pub fn new(domain: DomainDescriptor, matrix: CMatrix) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} columns for a domain of dimension {}",
                matrix.ncols(),
                domain.dim()
            )));
        }
        Ok(Self { domain, matrix })
    }

    pub fn zero(domain: DomainDescriptor, codomain_dim: usize) -> Self {
        let dim = domain.dim();
        Self {
            domain,
            matrix: CMatrix::zeros(codomain_dim, dim),
        }
    }

    /// i.i.d. complex Gaussian entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, domain: DomainDescriptor, codomain_dim: usize) -> Self {
        let dim = domain.dim();
        Self {
            domain,
            matrix: CMatrix::from_fn(codomain_dim, dim, |_, _| complex_normal(rng)),
        }
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.matrix.nrows())
            .map(|i| (0..self.matrix.ncols()).map(|j| self.matrix[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        crate::linalg::max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn to_file(&self) -> LinearMapFile {
        LinearMapFile {
            domain: self.domain.clone(),
            codomain_dim: self.codomain_dim(),
            matrix: matrix_to_rows(&self.matrix),
        }
    }
}

/// Wire format of a [`LinearMap`]: rows indexed by codomain component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearMapFile {
    pub domain: DomainDescriptor,
    pub codomain_dim: usize,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl LinearMapFile {
    pub fn into_map(self) -> Result<LinearMap> {
        let matrix = if self.matrix.is_empty() {
            CMatrix::zeros(0, self.domain.dim())
        } else {
            matrix_from_rows(&self.matrix).ok_or_else(|| Error::InvalidInput("ragged linear map matrix".into()))?
        };
        if matrix.nrows() != self.codomain_dim {
            return Err(Error::DimensionMismatch(format!(
                "{} rows declared as codomain dimension {}",
                matrix.nrows(),
                self.codomain_dim
            )));
        }
        LinearMap::new(self.domain, matrix)
    }
}

/// The polynomial `x ↦ Φ(xⁿ)`.
pub fn prototypical(algebra: SharedAlgebra, n: usize, phi: &LinearMap) -> Result<HomPoly> {
    if algebra.descriptor() != phi.domain {
        return Err(Error::InvalidInput(format!(
            "map over {} used on {}",
            phi.domain,
            algebra.descriptor()
        )));
    }
    let alg = Arc::clone(&algebra);
    let phi = phi.clone();
    HomPoly::black_box(algebra, n, phi.codomain_dim(), move |x| {
        phi.apply(&power(alg.as_ref(), x, n))
    })
}

/// `P(f) = Σ_π w_π trace(f̂(π)ⁿ)` as a symmetric tensor over the point-mass basis.
pub fn fourier_trace_power_tensor(registry: &IrrepRegistry, n: usize) -> Result<SymTensor> {
    weighted_trace_power_tensor(registry, n, &vec![Complex64::new(1.0, 0.0); registry.len()])
}

pub fn weighted_trace_power_tensor(registry: &IrrepRegistry, n: usize, weights: &[Complex64]) -> Result<SymTensor> {
    if weights.len() != registry.len() {
        return Err(Error::DimensionMismatch("one weight per irrep".into()));
    }
    let g = registry.group();
    let order = g.order();
    let mut tensor = SymTensor::new(n, order, 1)?;
    // δ_t has Fourier block U_π(t⁻¹)/|G|
    let scale = (order as f64).powi(-(n as i32));
    let inv_mats: Vec<Vec<&CMatrix>> = registry
        .irreps()
        .iter()
        .map(|irrep| (0..order).map(|t| &irrep.matrices[g.inv(t)]).collect())
        .collect();
    for key in (0..order).combinations_with_replacement(n) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut count = 0usize;
        for perm in key.iter().copied().permutations(n).unique() {
            count += 1;
            for (p, w) in inv_mats.iter().zip(weights) {
                let mut m = p[perm[0]].clone();
                for &t in &perm[1..] {
                    m *= p[t];
                }
                total += w * m.trace();
            }
        }
        tensor.set(0, &key, total * scale / count as f64)?;
    }
    Ok(tensor)
}

/// `P(f) = Σ_π w_π trace(f̂(π)ⁿ)` evaluated on the Fourier side.
pub fn block_power_trace(registry: &IrrepRegistry, n: usize, weights: Vec<Complex64>) -> Result<HomPoly> {
    registry.require_complete()?;
    let r = registry.clone();
    let g = Arc::clone(registry.group());
    let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
    HomPoly::black_box(alg, n, 1, move |x| {
        let f = AlgElement::new(Arc::clone(&g), x.to_vec()).expect("length checked by caller");
        let side = fourier(&f, &r).expect("registry matches");
        let value = side
            .blocks
            .iter()
            .zip(&weights)
            .map(|(b, w)| {
                let mut m = b.clone();
                for _ in 1..n {
                    m *= b;
                }
                w * m.trace()
            })
            .sum();
        vec![value]
    })
}

/// `P(f) = Σ_π (trace f̂(π))ⁿ`: additive on orthogonal pairs from distinct
/// ideals but not on splits inside a block of dimension ≥ 2.
pub fn block_trace_then_power(registry: &IrrepRegistry, n: usize) -> Result<HomPoly> {
    registry.require_complete()?;
    let r = registry.clone();
    let g = Arc::clone(registry.group());
    let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
    HomPoly::black_box(alg, n, 1, move |x| {
        let f = AlgElement::new(Arc::clone(&g), x.to_vec()).expect("length checked by caller");
        let side = fourier(&f, &r).expect("registry matches");
        vec![side.blocks.iter().map(|b| b.trace().powu(n as u32)).sum()]
    })
}

/// `P(f) = f(e)ⁿ = (Σ_π d_π trace f̂(π))ⁿ`, not additive even across ideals.
pub fn total_trace_then_power(group: &Arc<GroupTable>, n: usize) -> Result<HomPoly> {
    let e = group.identity();
    let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(group)));
    HomPoly::black_box(alg, n, 1, move |x| vec![x[e].powu(n as u32)])
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// max ‖P(f) − Φ(fⁿ)‖ / (1 + ‖P(f)‖)
    pub max_residual: f64,
    pub pass: bool,
}

pub fn verify_representation(
    p: &HomPoly,
    phi: &LinearMap,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let alg = p.algebra();
    if alg.descriptor() != phi.domain || phi.codomain_dim() != p.codomain_dim() {
        return Err(Error::InvalidInput(format!(
            "polynomial {} → C^{} and map {} → C^{} do not share a domain",
            alg.descriptor(),
            p.codomain_dim(),
            phi.domain,
            phi.codomain_dim()
        )));
    }
    let mut rng = seeded(seed);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let f = complex_normal_vec(&mut rng, alg.dim());
        let pf = p.eval(&f);
        let rhs = phi.apply(&power(alg.as_ref(), &f, p.degree()));
        max_residual = max_residual.max(vec_diff_norm2(&pf, &rhs) / (1.0 + vec_norm2(&pf)));
    }
    Ok(VerificationReport {
        samples,
        seed,
        tol,
        max_residual,
        pass: max_residual <= tol,
    })
}

fn verified(p: &HomPoly, phi: LinearMap) -> Result<LinearMap> {
    let report = verify_representation(p, &phi, DEFAULT_PROBES, VERIFY_SEED, DEFAULT_VERIFY_TOL)?;
    if report.pass {
        Ok(phi)
    } else {
        Err(Error::VerificationFailure {
            residual: report.max_residual,
            tol: report.tol,
        })
    }
}

/// `Φ(a) = φ(a, I, …, I)` on 𝕄_k without the verification probe.
fn theta_matrix(p: &HomPoly, k: usize) -> Result<LinearMap> {
    let alg = MatrixAlgebra::new(k);
    if p.domain() != alg.descriptor() {
        return Err(Error::InvalidInput(format!(
            "expected a polynomial over {}, got {}",
            alg.descriptor(),
            p.domain()
        )));
    }
    let phi = polarize(p)?;
    let unit = alg.unit().expect("matrix algebras are unital");
    let mut matrix = CMatrix::zeros(p.codomain_dim(), k * k);
    for j in 0..k * k {
        let basis = alg.unit_matrix(j / k, j % k);
        let mut args: Vec<&[Complex64]> = vec![&unit; p.degree()];
        args[0] = &basis;
        for (i, v) in phi.eval(&args).into_iter().enumerate() {
            matrix[(i, j)] = v;
        }
    }
    LinearMap::new(alg.descriptor(), matrix)
}

/// Representing map of an orthogonally additive polynomial on 𝕄_k.
pub fn phi_matrix_algebra(p: &HomPoly) -> Result<LinearMap> {
    let k = match p.domain() {
        DomainDescriptor::Matrix { k } => k,
        other => return Err(Error::InvalidInput(format!("expected a matrix algebra, got {other}"))),
    };
    verified(p, theta_matrix(p, k)?)
}

fn check_group_domain(p: &HomPoly, registry: &IrrepRegistry) -> Result<()> {
    registry.require_complete()?;
    let expected = GroupAlgebra::new(Arc::clone(registry.group())).descriptor();
    if p.domain() != expected {
        return Err(Error::InvalidInput(format!(
            "polynomial over {} used with the registry of {}",
            p.domain(),
            expected
        )));
    }
    Ok(())
}

/// `Φ(δ_t) = Σ_π φ(δ_t∗e_π, e_π, …, e_π)`, without the verification probe.
pub fn phi_group_unverified(p: &HomPoly, registry: &IrrepRegistry) -> Result<LinearMap> {
    check_group_domain(p, registry)?;
    let g = registry.group();
    let phi = polarize(p)?;
    let idem = central_idempotents(registry);
    let mut matrix = CMatrix::zeros(p.codomain_dim(), g.order());
    for t in 0..g.order() {
        let delta = AlgElement::basis(g, t);
        for e in &idem {
            let first = crate::fourier::convolve(&delta, e)?;
            let mut args: Vec<&[Complex64]> = vec![e.values(); p.degree()];
            args[0] = first.values();
            for (i, v) in phi.eval(&args).into_iter().enumerate() {
                matrix[(i, t)] += v;
            }
        }
    }
    LinearMap::new(p.domain(), matrix)
}

/// Representing map of an orthogonally additive polynomial on ℂ[G].
pub fn phi_group(p: &HomPoly, registry: &IrrepRegistry) -> Result<LinearMap> {
    verified(p, phi_group_unverified(p, registry)?)
}

/// The restriction `A ↦ P(ι(Aᵀ))` of `p` to the ideal of irrep `index`,
/// where `ι` places a Fourier block. `A ↦ ι(Aᵀ)` is an algebra isomorphism
/// 𝕄_d → ideal, because the transform reverses products.
pub fn block_restriction(p: &HomPoly, registry: &IrrepRegistry, index: usize) -> Result<HomPoly> {
    let d = registry.irreps()[index].dim;
    let r = registry.clone();
    let inner = p.clone();
    let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(d));
    HomPoly::black_box(alg, p.degree(), p.codomain_dim(), move |x| {
        let a = CMatrix::from_row_slice(d, d, x);
        let f = embed_block(&r, index, &a.transpose()).expect("registry is complete");
        inner.eval(f.values())
    })
}

/// Group-path Φ assembled from the matrix path on every ideal:
/// `Φ(f) = Σ_π Θ_π(f̂(π)ᵀ)` with `Θ_π` the representing map of the block restriction.
pub fn phi_group_blockwise(p: &HomPoly, registry: &IrrepRegistry) -> Result<LinearMap> {
    check_group_domain(p, registry)?;
    let g = registry.group();
    let thetas = (0..registry.len())
        .map(|i| phi_matrix_algebra(&block_restriction(p, registry, i)?))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = CMatrix::zeros(p.codomain_dim(), g.order());
    for t in 0..g.order() {
        let side = fourier(&AlgElement::basis(g, t), registry)?;
        for (theta, block) in thetas.iter().zip(&side.blocks) {
            // row-major coordinates of f̂(π)ᵀ are the column-major entries of f̂(π)
            let coords: Vec<Complex64> = block.iter().copied().collect();
            for (i, v) in theta.apply(&coords).into_iter().enumerate() {
                matrix[(i, t)] += v;
            }
        }
    }
    verified(p, LinearMap::new(p.domain(), matrix)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpanReport {
    pub group: String,
    pub order: usize,
    pub degree: usize,
    pub samples: usize,
    pub rank: usize,
    /// smallest singular value over the largest
    pub condition_ratio: f64,
    pub pass: bool,
}

pub const RANK_THRESHOLD: f64 = 1e-8;

/// Numerical rank of `{fⁿ : f random}` with `2|G|` samples.
pub fn span_check(group: &Arc<GroupTable>, n: usize, seed: u64) -> Result<SpanReport> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be positive".into()));
    }
    let order = group.order();
    let alg = GroupAlgebra::new(Arc::clone(group));
    let samples = 2 * order;
    let mut rng = seeded(seed);
    let mut m = CMatrix::zeros(order, samples);
    for j in 0..samples {
        let f = complex_normal_vec(&mut rng, order);
        for (i, v) in power(&alg, &f, n).into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let (rank, sv) = numerical_rank(&m, RANK_THRESHOLD);
    let condition_ratio = match (sv.first(), sv.get(order - 1)) {
        (Some(&top), Some(&bottom)) if top > 0.0 => bottom / top,
        _ => 0.0,
    };
    Ok(SpanReport {
        group: group.name().to_string(),
        order,
        degree: n,
        samples,
        rank,
        condition_ratio,
        pass: rank == order,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct NormEstimateOptions {
    pub norm: DomainNorm,
    pub samples: usize,
    pub seed: u64,
    /// Random-perturbation ascent steps on the best sample; 0 disables.
    pub refine_steps: usize,
    /// Known upper bound for ‖P‖; brute-forced from the tensor when absent.
    pub upper: Option<f64>,
    pub certificates: usize,
}

impl NormEstimateOptions {
    pub fn new(norm: DomainNorm, seed: u64) -> Self {
        Self {
            norm,
            samples: 500,
            seed,
            refine_steps: 0,
            upper: None,
            certificates: 200,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub norm: DomainNorm,
    /// sampled max of ‖P(f)‖ over ‖f‖ = 1, a lower bound for ‖P‖
    pub poly_norm_est: f64,
    pub poly_norm_upper: f64,
    pub certificates_checked: usize,
    /// max over certificates of ‖Φ(a)‖ / (upper · Σ‖a_j‖ⁿ)
    pub worst_ratio: f64,
    pub bound_check: bool,
}

/// Largest number of sorted multi-indices the brute-force upper bound visits.
pub const BRUTE_FORCE_LIMIT: usize = 200_000;

/// `‖P‖ ≤ κⁿ Σ_{i₁≤…≤i_n} mult(i) ‖φ(b_{i₁},…,b_{i_n})‖` where κ bounds
/// coordinates by the norm.
pub fn brute_force_upper(p: &HomPoly, norm: DomainNorm) -> Result<f64> {
    let alg = p.algebra();
    let dim = alg.dim();
    let n = p.degree();
    let count = binomial(dim + n - 1, n);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::InvalidInput(format!(
            "{count} multi-indices exceed the brute-force limit; supply an upper bound"
        )));
    }
    let kappa = alg.coordinate_bound(norm)?;
    let phi = polarize(p)?;
    let basis: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[i] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    let mut total = 0.0;
    for key in (0..dim).combinations_with_replacement(n) {
        let args: Vec<&[Complex64]> = key.iter().map(|&i| basis[i].as_slice()).collect();
        total += multiplicity(&key) * vec_norm2(&phi.eval(&args));
    }
    Ok(total * kappa.powi(n as i32))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of distinct orderings of a sorted multi-index.
fn multiplicity(key: &[usize]) -> f64 {
    let runs = key.iter().chunk_by(|&&i| i);
    let denom: u64 = runs.into_iter().map(|(_, run)| factorial(run.count())).product();
    (factorial(key.len()) / denom) as f64
}

fn unit_sample<R: Rng>(alg: &dyn FiniteAlgebra, rng: &mut R, norm: DomainNorm) -> Result<Option<Vec<Complex64>>> {
    let f = complex_normal_vec(rng, alg.dim());
    let size = alg.norm(&f, norm)?;
    Ok((size > 0.0).then(|| f.into_iter().map(|v| v / size).collect()))
}

/// Sampled lower estimate for ‖P‖ plus the certificate inequality
/// `‖Φ(a)‖ ≤ upper · Σ‖a_j‖ⁿ` for random decompositions `a = Σ a_jⁿ`.
pub fn estimate_norms(p: &HomPoly, phi: &LinearMap, opts: &NormEstimateOptions) -> Result<NormEstimate> {
    let alg = p.algebra();
    let n = p.degree();
    let mut rng = seeded(opts.seed);
    let mut best = 0.0f64;
    let mut best_point: Option<Vec<Complex64>> = None;
    for _ in 0..opts.samples {
        if let Some(f) = unit_sample(alg.as_ref(), &mut rng, opts.norm)? {
            let v = vec_norm2(&p.eval(&f));
            if v > best || best_point.is_none() {
                best = v.max(best);
                best_point = Some(f);
            }
        }
    }
    if let Some(mut x) = best_point {
        let mut step = 0.3;
        for _ in 0..opts.refine_steps {
            let trial: Vec<Complex64> = x.iter().map(|v| v + complex_normal(&mut rng) * step).collect();
            let size = alg.norm(&trial, opts.norm)?;
            if size == 0.0 {
                continue;
            }
            let trial: Vec<Complex64> = trial.into_iter().map(|v| v / size).collect();
            let v = vec_norm2(&p.eval(&trial));
            if v > best {
                best = v;
                x = trial;
            } else {
                step *= 0.97;
            }
        }
    }
    let upper = match opts.upper {
        Some(u) => u,
        None => brute_force_upper(p, opts.norm)?,
    };
    let mut cert_rng = seeded(split(opts.seed, 1));
    let mut worst_ratio = 0.0f64;
    let mut bound_check = true;
    for _ in 0..opts.certificates {
        let parts = cert_rng.random_range(1..=3);
        let mut a = vec![Complex64::new(0.0, 0.0); alg.dim()];
        let mut budget = 0.0;
        for _ in 0..parts {
            let aj = complex_normal_vec(&mut cert_rng, alg.dim());
            budget += alg.norm(&aj, opts.norm)?.powi(n as i32);
            a.iter_mut().zip(power(alg.as_ref(), &aj, n)).for_each(|(x, y)| *x += y);
        }
        let lhs = vec_norm2(&phi.apply(&a));
        let rhs = upper * budget;
        if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
            bound_check = false;
        }
        if rhs > 0.0 {
            worst_ratio = worst_ratio.max(lhs / rhs);
        }
    }
    Ok(NormEstimate {
        norm: opts.norm,
        poly_norm_est: best,
        poly_norm_upper: upper,
        certificates_checked: opts.certificates,
        worst_ratio,
        bound_check: bound_check && best <= upper * (1.0 + 1e-9) + 1e-12,
    })
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    pub pairs: usize,
    pub seed: u64,
    pub oadd_tol: f64,
    pub verify_samples: usize,
    pub verify_tol: f64,
}

impl ExtractOptions {
    pub fn new(seed: u64) -> Self {
        Self {
            pairs: 200,
            seed,
            oadd_tol: 1e-9,
            verify_samples: DEFAULT_PROBES,
            verify_tol: DEFAULT_VERIFY_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteVerdict {
    pub suite: PairSuite,
    pub pairs: usize,
    pub outcome: OaddOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractReport {
    pub domain: DomainDescriptor,
    pub degree: usize,
    pub suites: Vec<SuiteVerdict>,
    /// both pair suites reached the same verdict
    pub suites_agree: bool,
    pub verification: VerificationReport,
    /// max entry difference between the blockwise and direct group paths
    pub path_agreement: Option<f64>,
    pub pass: bool,
}

/// Pair suites, group-path extraction, probe verification and the
/// blockwise cross-check. Extraction runs even if a suite finds a
/// counterexample, so the report shows both sides.
pub fn extract(p: &HomPoly, registry: &IrrepRegistry, opts: &ExtractOptions) -> Result<(LinearMap, ExtractReport)> {
    check_group_domain(p, registry)?;
    let suites = [PairSuite::Full, PairSuite::CrossIdeal]
        .into_iter()
        .map(|suite| {
            let pairs = orthogonal_pairs(PairDomain::Group(registry), opts.pairs, opts.seed, suite)?;
            Ok(SuiteVerdict {
                suite,
                pairs: pairs.len(),
                outcome: check_orthogonal_additivity(p, &pairs, opts.oadd_tol)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let suites_agree = suites
        .windows(2)
        .all(|w| w[0].outcome.passed() == w[1].outcome.passed());
    let phi = phi_group_unverified(p, registry)?;
    let verification = verify_representation(p, &phi, opts.verify_samples, split(opts.seed, 2), opts.verify_tol)?;
    let path_agreement = match phi_group_blockwise(p, registry) {
        Ok(other) => Some(other.max_entry_diff(&phi)),
        Err(Error::VerificationFailure { .. }) => None,
        Err(e) => return Err(e),
    };
    let pass = verification.pass && suites.iter().all(|s| s.outcome.passed());
    let report = ExtractReport {
        domain: p.domain(),
        degree: p.degree(),
        suites,
        suites_agree,
        verification,
        path_agreement,
        pass,
    };
    Ok((phi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::builtin_by_name;
    use crate::linalg::c;
    use crate::polynomials::{PolyForm, SymMultilinear};

    fn group_alg(name: &str) -> (Arc<GroupTable>, IrrepRegistry, SharedAlgebra) {
        let (g, r) = builtin_by_name(name).unwrap();
        let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
        (g, r, alg)
    }

    fn trace_square(k: usize) -> HomPoly {
        let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(k));
        HomPoly::black_box(alg, 2, 1, move |x| {
            let a = CMatrix::from_row_slice(k, k, x);
            vec![(&a * &a).trace()]
        })
        .unwrap()
    }

    #[test]
    fn trace_square_gives_trace() {
        let phi = phi_matrix_algebra(&trace_square(2)).unwrap();
        let expected = [1.0, 0.0, 0.0, 1.0];
        for (j, e) in expected.iter().enumerate() {
            assert!((phi.matrix[(0, j)] - c(*e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn matrix_round_trip() {
        let mut rng = seeded(3);
        let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(3));
        for n in 2..=3 {
            let phi0 = LinearMap::random(&mut rng, alg.descriptor(), 2);
            let p = prototypical(Arc::clone(&alg), n, &phi0).unwrap();
            let phi = phi_matrix_algebra(&p).unwrap();
            assert!(phi.max_entry_diff(&phi0) < 1e-10);
        }
    }

    #[test]
    fn trace_then_square_has_no_representation() {
        let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(2));
        let p = HomPoly::black_box(alg, 2, 1, |x| vec![(x[0] + x[3]) * (x[0] + x[3])]).unwrap();
        assert!(matches!(phi_matrix_algebra(&p), Err(Error::VerificationFailure { .. })));
    }

    #[test]
    fn z3_weighted_squares() {
        // P(f) = Σ_k w_k f̂(k)² with w = (1,2,3) ⇒ Φ(f) = Σ_k w_k f̂(k)
        let (g, r, _) = group_alg("z3");
        let weights: Vec<_> = [1.0, 2.0, 3.0].iter().map(|&w| c(w, 0.0)).collect();
        let p = block_power_trace(&r, 2, weights.clone()).unwrap();
        let phi = phi_group(&p, &r).unwrap();
        let idem = central_idempotents(&r);
        let f = &idem[0] + &idem[1];
        assert!((p.eval(f.values())[0] - c(3.0, 0.0)).norm() < 1e-12);
        let f2 = crate::fourier::power(&f, 2).unwrap();
        assert!((phi.apply(f2.values())[0] - c(3.0, 0.0)).norm() < 1e-12);
        // closed form of Φ on point masses: f̂(k) = χ_k(t⁻¹)/|G| at δ_t
        for t in 0..3 {
            let side = fourier(&AlgElement::basis(&g, t), &r).unwrap();
            let expected: Complex64 = side.blocks.iter().zip(&weights).map(|(b, w)| w * b[(0, 0)]).sum();
            assert!((phi.matrix[(0, t)] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn z2_difference_of_squares_is_value_at_generator() {
        let (g, r, _) = group_alg("z2");
        let p = block_power_trace(&r, 2, vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let phi = phi_group(&p, &r).unwrap();
        // Φ(f) = f̂(0) − f̂(1) = f(1) under normalized measure
        let mut rng = seeded(1);
        let f = AlgElement::random(&g, &mut rng);
        assert!((phi.apply(f.values())[0] - f.values()[1]).norm() < 1e-12);
    }

    #[test]
    fn group_round_trip_s3_cubic() {
        let (_, r, alg) = group_alg("s3");
        let mut rng = seeded(9);
        let phi0 = LinearMap::random(&mut rng, alg.descriptor(), 2);
        let p = prototypical(alg, 3, &phi0).unwrap();
        let phi = phi_group(&p, &r).unwrap();
        assert!(phi.max_entry_diff(&phi0) < 1e-9);
    }

    #[test]
    fn blockwise_path_agrees_on_d4() {
        let (_, r, alg) = group_alg("d4");
        let mut rng = seeded(10);
        let phi0 = LinearMap::random(&mut rng, alg.descriptor(), 1);
        let p = prototypical(Arc::clone(&alg), 2, &phi0).unwrap();
        let a = phi_group(&p, &r).unwrap();
        let b = phi_group_blockwise(&p, &r).unwrap();
        assert!(a.max_entry_diff(&b) < 1e-10);

        let p = block_power_trace(&r, 3, vec![c(1.0, 0.5); r.len()]).unwrap();
        let a = phi_group(&p, &r).unwrap();
        let b = phi_group_blockwise(&p, &r).unwrap();
        assert!(a.max_entry_diff(&b) < 1e-10);
    }

    #[test]
    fn zero_map_fails_against_trace_polynomial() {
        let (_, r, alg) = group_alg("s3");
        let p = block_power_trace(&r, 2, vec![c(1.0, 0.0); 3]).unwrap();
        let zero = LinearMap::zero(alg.descriptor(), 1);
        let report = verify_representation(&p, &zero, 200, 4, 1e-9).unwrap();
        assert!(!report.pass);
        assert!(report.max_residual > 0.3 && report.max_residual < 1.0);
    }

    #[test]
    fn negative_controls_fail_everywhere() {
        for name in ["s3", "d4", "q8"] {
            let (_, r, _) = group_alg(name);
            let p = block_trace_then_power(&r, 2).unwrap();
            assert!(matches!(phi_group(&p, &r), Err(Error::VerificationFailure { .. })));
            assert!(matches!(
                phi_group_blockwise(&p, &r),
                Err(Error::VerificationFailure { .. })
            ));
        }
        let (g, r, _) = group_alg("z6");
        let p = total_trace_then_power(&g, 2).unwrap();
        assert!(matches!(phi_group(&p, &r), Err(Error::VerificationFailure { .. })));
        // per-block traces are plain squares on an abelian group
        assert!(phi_group(&block_trace_then_power(&r, 2).unwrap(), &r).is_ok());
    }

    #[test]
    fn span_ranks() {
        for (name, n, rank) in [("z4", 2, 4), ("s3", 3, 6), ("trivial", 2, 1), ("trivial", 5, 1)] {
            let (g, _, _) = group_alg(name);
            let report = span_check(&g, n, 17).unwrap();
            assert_eq!(report.rank, rank, "{name} n={n}");
            assert!(report.pass);
        }
    }

    #[test]
    fn trace_tensor_matches_fourier_evaluation() {
        let (g, r, alg) = group_alg("s3");
        let t = fourier_trace_power_tensor(&r, 3).unwrap();
        let p_tensor = HomPoly::from_tensor(Arc::clone(&alg), t.clone()).unwrap();
        let p_side = block_power_trace(&r, 3, vec![c(1.0, 0.0); 3]).unwrap();
        let mut rng = seeded(6);
        for _ in 0..10 {
            let f = AlgElement::random(&g, &mut rng);
            assert!((p_tensor.eval(f.values())[0] - p_side.eval(f.values())[0]).norm() < 1e-12);
        }
        let sym = SymMultilinear::from_tensor(alg, t).unwrap();
        assert_eq!(sym.degree(), 3);
        assert!(matches!(p_tensor.form(), PolyForm::Tensor(_)));
    }

    #[test]
    fn norm_estimates() {
        let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(2));
        let zero = LinearMap::zero(alg.descriptor(), 1);
        let p0 = prototypical(Arc::clone(&alg), 2, &zero).unwrap();
        let est = estimate_norms(&p0, &zero, &NormEstimateOptions::new(DomainNorm::Operator, 1)).unwrap();
        assert_eq!(est.poly_norm_est, 0.0);
        assert!(est.bound_check);

        let p = trace_square(2);
        let phi = phi_matrix_algebra(&p).unwrap();
        let opts = NormEstimateOptions::new(DomainNorm::Operator, 2);
        let est = estimate_norms(&p, &phi, &opts).unwrap();
        assert!(est.poly_norm_est <= 2.0 + 1e-12 && est.poly_norm_est > 1.0);
        assert!(est.bound_check);
        assert!((est.poly_norm_upper - 4.0).abs() < 1e-12);
        let refined = estimate_norms(
            &p,
            &phi,
            &NormEstimateOptions {
                refine_steps: 300,
                ..opts
            },
        )
        .unwrap();
        assert!(refined.poly_norm_est >= est.poly_norm_est);
        assert!(refined.poly_norm_est <= 2.0 + 1e-12);
        let with_two = estimate_norms(
            &p,
            &phi,
            &NormEstimateOptions {
                upper: Some(2.0),
                ..opts
            },
        )
        .unwrap();
        assert!(with_two.bound_check);

        let lambda = c(0.0, -3.0);
        let scaled = p.scaled(lambda);
        let est2 = estimate_norms(
            &scaled,
            &LinearMap::new(phi.domain.clone(), &phi.matrix * lambda).unwrap(),
            &opts,
        )
        .unwrap();
        assert!((est2.poly_norm_est - 3.0 * est.poly_norm_est).abs() < 1e-12);
    }

    #[test]
    fn extraction_report_on_trace_polynomial() {
        let (_, r, alg) = group_alg("s3");
        let p = HomPoly::from_tensor(alg, fourier_trace_power_tensor(&r, 2).unwrap()).unwrap();
        let (phi, report) = extract(&p, &r, &ExtractOptions::new(7)).unwrap();
        assert!(report.pass && report.suites_agree);
        assert!(report.path_agreement.unwrap() < 1e-10);
        assert_eq!(phi.codomain_dim(), 1);

        let bad = block_trace_then_power(&r, 2).unwrap();
        let (_, report) = extract(&bad, &r, &ExtractOptions::new(7)).unwrap();
        assert!(!report.pass);
        // cross-ideal pairs cannot see a violation confined to one block
        assert!(!report.suites_agree);
        assert!(report.path_agreement.is_none());
    }

    #[test]
    fn linear_map_file_round_trip() {
        let mut rng = seeded(12);
        let m = LinearMap::random(&mut rng, DomainDescriptor::Matrix { k: 2 }, 3);
        let text = serde_json::to_string(&m.to_file()).unwrap();
        let back: LinearMapFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_map().unwrap(), m);
    }
}

//! Certificate-backed bounds for the decomposition norms
//! `‖a‖_{𝒫ₙ} = inf Σ‖a_j‖ⁿ` over `a = Σ a_jⁿ` and
//! `‖a‖_{𝒮ₙ} = inf Σ‖a_{1j}‖⋯‖a_{nj}‖` over `a = Σ S_n(a_{1j},…,a_{nj})`.
//!
//! Infima are never computed. Upper bounds come with explicit
//! decompositions that [`verify_certificate`] re-checks; lower bounds are
//! `‖a‖`, valid for every submultiplicative norm.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{banach_norm, banach_norm_plain, decompose, power, AlgElement, AlgElementJson, BanachNorm};
use crate::group::{same_group, GroupTable, IrrepRegistry};
use crate::polynomials::{check_degree, factorial, sym_product_elements};
use crate::rng::seeded;

/// Reconstruction tolerance of certificates, relative to ‖a‖.
pub const RECONSTRUCTION_TOL: f64 = 1e-10;
/// Relative tolerance on the recomputed claimed bound.
pub const BOUND_TOL: f64 = 1e-12;
/// Additive slack on the upper end of the inequality chain.
pub const CHAIN_SLACK: f64 = 1e-9;

/// A Banach norm on ℂ[G] together with the registry some norms need.
#[derive(Clone, Copy, Debug)]
pub struct NormContext<'a> {
    pub norm: BanachNorm,
    pub registry: Option<&'a IrrepRegistry>,
}

impl<'a> NormContext<'a> {
    pub fn l1() -> Self {
        Self {
            norm: BanachNorm::L1,
            registry: None,
        }
    }

    pub fn new(norm: BanachNorm, registry: Option<&'a IrrepRegistry>) -> Self {
        Self { norm, registry }
    }

    pub fn eval(&self, f: &AlgElement) -> Result<f64> {
        match self.registry {
            Some(r) => banach_norm(f, self.norm, r),
            None => banach_norm_plain(f, self.norm),
        }
    }

    /// `‖fg‖ ≤ ‖f‖‖g‖` holds, so `‖a‖` bounds both infima from below.
    pub fn is_submultiplicative(&self) -> bool {
        !matches!(self.norm, BanachNorm::Sp(_))
    }
}

#[derive(Clone, Debug)]
pub struct PnCertificate {
    pub target: AlgElement,
    pub parts: Vec<AlgElement>,
    pub degree: usize,
    pub norm: BanachNorm,
    pub claimed_bound: f64,
}

#[derive(Clone, Debug)]
pub struct SnCertificate {
    pub target: AlgElement,
    pub tuples: Vec<Vec<AlgElement>>,
    pub degree: usize,
    pub norm: BanachNorm,
    pub claimed_bound: f64,
}

#[derive(Clone, Debug)]
pub enum Certificate {
    Pn(PnCertificate),
    Sn(SnCertificate),
}

impl Certificate {
    pub fn claimed_bound(&self) -> f64 {
        match self {
            Self::Pn(c) => c.claimed_bound,
            Self::Sn(c) => c.claimed_bound,
        }
    }

    pub fn to_file(&self) -> CertificateFile {
        match self {
            Self::Pn(c) => CertificateFile {
                target: c.target.to_json(),
                parts: Some(c.parts.iter().map(AlgElement::to_json).collect()),
                tuples: None,
                degree: c.degree,
                norm: c.norm.label(),
                claimed_bound: c.claimed_bound,
            },
            Self::Sn(c) => CertificateFile {
                target: c.target.to_json(),
                parts: None,
                tuples: Some(
                    c.tuples
                        .iter()
                        .map(|t| t.iter().map(AlgElement::to_json).collect())
                        .collect(),
                ),
                degree: c.degree,
                norm: c.norm.label(),
                claimed_bound: c.claimed_bound,
            },
        }
    }
}

/// Wire format `{"target", "parts"|"tuples", "degree", "norm", "claimed_bound"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub target: AlgElementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<AlgElementJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuples: Option<Vec<Vec<AlgElementJson>>>,
    pub degree: usize,
    pub norm: String,
    pub claimed_bound: f64,
}

impl CertificateFile {
    pub fn into_certificate(self, group: &Arc<GroupTable>) -> Result<Certificate> {
        let target = AlgElement::from_json(&self.target, group)?;
        let norm = BanachNorm::parse(&self.norm)?;
        check_degree(self.degree)?;
        match (self.parts, self.tuples) {
            (Some(parts), None) => Ok(Certificate::Pn(PnCertificate {
                target,
                parts: parts
                    .iter()
                    .map(|p| AlgElement::from_json(p, group))
                    .collect::<Result<_>>()?,
                degree: self.degree,
                norm,
                claimed_bound: self.claimed_bound,
            })),
            (None, Some(tuples)) => {
                let tuples = tuples
                    .iter()
                    .map(|t| {
                        if t.len() != self.degree {
                            return Err(Error::InvalidInput(format!(
                                "tuple of length {} for degree {}",
                                t.len(),
                                self.degree
                            )));
                        }
                        t.iter().map(|p| AlgElement::from_json(p, group)).collect()
                    })
                    .collect::<Result<_>>()?;
                Ok(Certificate::Sn(SnCertificate {
                    target,
                    tuples,
                    degree: self.degree,
                    norm,
                    claimed_bound: self.claimed_bound,
                }))
            }
            _ => Err(Error::InvalidInput(
                "a certificate has exactly one of \"parts\" and \"tuples\"".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateCheck {
    /// ‖Σ(reconstruction) − a‖ / ‖a‖ (absolute when a = 0)
    pub residual: f64,
    pub recomputed_bound: f64,
    pub claimed_bound: f64,
    pub pass: bool,
}

fn failure() -> CertificateCheck {
    CertificateCheck {
        residual: f64::INFINITY,
        recomputed_bound: f64::NAN,
        claimed_bound: f64::NAN,
        pass: false,
    }
}

/// Recomputes the reconstruction sum and the bound. Pass iff the relative
/// reconstruction residual is within `tol` and the claimed bound matches
/// the recomputed one to [`BOUND_TOL`].
pub fn verify_certificate(cert: &Certificate, registry: Option<&IrrepRegistry>, tol: f64) -> Result<CertificateCheck> {
    let (target, degree, norm, claimed) = match cert {
        Certificate::Pn(c) => (&c.target, c.degree, c.norm, c.claimed_bound),
        Certificate::Sn(c) => (&c.target, c.degree, c.norm, c.claimed_bound),
    };
    let ctx = NormContext::new(norm, registry);
    let mut sum = AlgElement::zero(target.group());
    let mut bound = 0.0;
    match cert {
        Certificate::Pn(c) => {
            for part in &c.parts {
                if !same_group(part.group(), target.group()) {
                    return Ok(failure());
                }
                sum = &sum + &power(part, degree)?;
                bound += ctx.eval(part)?.powi(degree as i32);
            }
        }
        Certificate::Sn(c) => {
            for tuple in &c.tuples {
                if tuple.len() != degree || tuple.iter().any(|p| !same_group(p.group(), target.group())) {
                    return Ok(failure());
                }
                sum = &sum + &sym_product_elements(tuple)?;
                let mut prod = 1.0;
                for p in tuple {
                    prod *= ctx.eval(p)?;
                }
                bound += prod;
            }
        }
    }
    let scale = ctx.eval(target)?;
    let diff = ctx.eval(&(&sum - target))?;
    let residual = if scale > 0.0 { diff / scale } else { diff };
    let bound_ok = (claimed - bound).abs() <= BOUND_TOL * bound.max(1.0);
    Ok(CertificateCheck {
        residual,
        recomputed_bound: bound,
        claimed_bound: claimed,
        pass: residual <= tol && bound_ok,
    })
}

impl PnCertificate {
    fn from_parts(target: AlgElement, parts: Vec<AlgElement>, degree: usize, ctx: &NormContext<'_>) -> Result<Self> {
        let mut claimed_bound = 0.0;
        for p in &parts {
            claimed_bound += ctx.eval(p)?.powi(degree as i32);
        }
        Ok(Self {
            target,
            parts,
            degree,
            norm: ctx.norm,
            claimed_bound,
        })
    }

    /// Certificate for `λa` from one for `a`: parts scaled by an n-th root of λ.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let root = lambda.powf(1.0 / self.degree as f64);
        Self {
            target: self.target.scale(lambda),
            parts: self.parts.iter().map(|p| p.scale(root)).collect(),
            degree: self.degree,
            norm: self.norm,
            claimed_bound: self.claimed_bound * lambda.norm(),
        }
    }

    /// Certificate for `a + b` with bound the sum of the two bounds.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        self.target.check_same(&other.target)?;
        if self.degree != other.degree || self.norm != other.norm {
            return Err(Error::InvalidInput("certificates of different degree or norm".into()));
        }
        Ok(Self {
            target: &self.target + &other.target,
            parts: self.parts.iter().chain(&other.parts).cloned().collect(),
            degree: self.degree,
            norm: self.norm,
            claimed_bound: self.claimed_bound + other.claimed_bound,
        })
    }
}

impl SnCertificate {
    pub fn scaled(&self, lambda: Complex64) -> Self {
        Self {
            target: self.target.scale(lambda),
            tuples: self
                .tuples
                .iter()
                .map(|t| {
                    let mut t = t.clone();
                    t[0] = t[0].scale(lambda);
                    t
                })
                .collect(),
            degree: self.degree,
            norm: self.norm,
            claimed_bound: self.claimed_bound * lambda.norm(),
        }
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        self.target.check_same(&other.target)?;
        if self.degree != other.degree || self.norm != other.norm {
            return Err(Error::InvalidInput("certificates of different degree or norm".into()));
        }
        Ok(Self {
            target: &self.target + &other.target,
            tuples: self.tuples.iter().chain(&other.tuples).cloned().collect(),
            degree: self.degree,
            norm: self.norm,
            claimed_bound: self.claimed_bound + other.claimed_bound,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `a = S_n(δ_e, …, δ_e, a)`
    Identity,
    /// signed polarization expansion of a symmetrized-product certificate
    Polarization,
    /// `a = (μ^{-1/n} a)ⁿ` when `aⁿ = μa`
    ScaledPower,
    /// best route per ideal component `a∗e_π`, concatenated
    Componentwise,
}

#[derive(Clone, Debug)]
pub struct NormBound {
    pub lower: f64,
    pub upper: f64,
    pub route: Route,
    pub certificate: Certificate,
}

fn lower_bound(a: &AlgElement, ctx: &NormContext<'_>) -> Result<f64> {
    Ok(if ctx.is_submultiplicative() { ctx.eval(a)? } else { 0.0 })
}

fn identity_sn_certificate(a: &AlgElement, n: usize, ctx: &NormContext<'_>) -> Result<SnCertificate> {
    let delta = AlgElement::delta_e(a.group());
    let mut tuple = vec![delta.clone(); n - 1];
    tuple.push(a.clone());
    let claimed_bound = ctx.eval(&delta)?.powi(n as i32 - 1) * ctx.eval(a)?;
    Ok(SnCertificate {
        target: a.clone(),
        tuples: vec![tuple],
        degree: n,
        norm: ctx.norm,
        claimed_bound,
    })
}

/// Symmetrized-product bound through `a = S_n(δ_e, …, δ_e, a)`. Under the
/// L¹ norm `‖δ_e‖₁ = 1`, so lower and upper both equal `‖a‖₁`.
pub fn sn_bound(a: &AlgElement, n: usize, ctx: &NormContext<'_>) -> Result<NormBound> {
    check_degree(n)?;
    let cert = identity_sn_certificate(a, n, ctx)?;
    Ok(NormBound {
        lower: lower_bound(a, ctx)?,
        upper: cert.claimed_bound,
        route: Route::Identity,
        certificate: Certificate::Sn(cert),
    })
}

/// Parts of the expansion
/// `S_n(a₁,…,a_n) = Σ_ε ((Πw/(n!2ⁿ))^{1/n} (ε₁⋯ε_n)^{1/n} (ε₁b₁+⋯+ε_nb_n))ⁿ`
/// with `a_l = w_l b_l`. `log_w` of `None` equalizes the norms of the `b_l`.
fn polarization_parts(tuple: &[AlgElement], log_w: Option<&[f64]>, ctx: &NormContext<'_>) -> Result<Vec<AlgElement>> {
    let n = tuple.len();
    let norms = tuple.iter().map(|a| ctx.eval(a)).collect::<Result<Vec<_>>>()?;
    if norms.contains(&0.0) {
        return Ok(Vec::new());
    }
    let weights: Vec<f64> = match log_w {
        Some(lw) => lw.iter().map(|x| x.exp()).collect(),
        None => {
            let beta = (norms.iter().map(|x| x.ln()).sum::<f64>() / n as f64).exp();
            norms.iter().map(|x| x / beta).collect()
        }
    };
    let b: Vec<AlgElement> = tuple
        .iter()
        .zip(&weights)
        .map(|(a, w)| a.scale(Complex64::new(1.0 / w, 0.0)))
        .collect();
    let c = weights.iter().product::<f64>() / (factorial(n) as f64 * 2f64.powi(n as i32));
    let c_root = c.powf(1.0 / n as f64);
    let minus_root = Complex64::from_polar(1.0, PI / n as f64);
    let mut parts = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let mut acc = AlgElement::zero(tuple[0].group());
        let mut negatives = 0;
        for (l, bl) in b.iter().enumerate() {
            if mask & (1 << l) == 0 {
                acc = &acc + bl;
            } else {
                acc = &acc - bl;
                negatives += 1;
            }
        }
        let sign_root = if negatives % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            minus_root
        };
        parts.push(acc.scale(sign_root * c_root));
    }
    Ok(parts)
}

/// Expands a symmetrized-product certificate into an n-th power certificate
/// with bound at most `(nⁿ/n!)` times the original.
pub fn polarize_certificate(sn: &SnCertificate, ctx: &NormContext<'_>) -> Result<PnCertificate> {
    let mut parts = Vec::new();
    for tuple in &sn.tuples {
        parts.extend(polarization_parts(tuple, None, ctx)?);
    }
    PnCertificate::from_parts(sn.target.clone(), parts, sn.degree, ctx)
}

/// `a = (μ^{-1/n} a)ⁿ` if `aⁿ = μa` for some `μ ≠ 0`.
fn scaled_power_certificate(a: &AlgElement, n: usize, ctx: &NormContext<'_>) -> Result<Option<PnCertificate>> {
    let an = power(a, n)?;
    let aa: f64 = a.values().iter().map(|x| x.norm_sqr()).sum();
    if aa == 0.0 {
        return Ok(None);
    }
    let mu: Complex64 = a
        .values()
        .iter()
        .zip(an.values())
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        / aa;
    let residual = (&an - &a.scale(mu))
        .values()
        .iter()
        .map(|x| x.norm_sqr())
        .sum::<f64>()
        .sqrt();
    if mu.norm() <= 1e-12 || residual > 1e-12 * (mu.norm() * aa.sqrt()) {
        return Ok(None);
    }
    let part = a.scale(mu.powf(-1.0 / n as f64));
    Ok(Some(PnCertificate::from_parts(a.clone(), vec![part], n, ctx)?))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PnOptions {
    /// Seeded random-perturbation steps on the polarization weights; 0 disables.
    pub refine_steps: usize,
    pub seed: u64,
}

fn polarization_route(a: &AlgElement, n: usize, ctx: &NormContext<'_>, opts: &PnOptions) -> Result<PnCertificate> {
    let sn = identity_sn_certificate(a, n, ctx)?;
    let mut best = polarize_certificate(&sn, ctx)?;
    if opts.refine_steps == 0 || best.parts.is_empty() {
        return Ok(best);
    }
    let tuple = &sn.tuples[0];
    let norms = tuple.iter().map(|x| ctx.eval(x)).collect::<Result<Vec<_>>>()?;
    let mean = norms.iter().map(|x| x.ln()).sum::<f64>() / n as f64;
    let mut log_w: Vec<f64> = norms.iter().map(|x| x.ln() - mean).collect();
    let mut rng = seeded(opts.seed);
    let mut step = 0.5;
    for _ in 0..opts.refine_steps {
        let mut trial: Vec<f64> = log_w.iter().map(|x| x + step * (rng.random::<f64>() - 0.5)).collect();
        let shift = trial.iter().sum::<f64>() / n as f64;
        trial.iter_mut().for_each(|x| *x -= shift);
        let parts = polarization_parts(tuple, Some(&trial), ctx)?;
        let cand = PnCertificate::from_parts(a.clone(), parts, n, ctx)?;
        if cand.claimed_bound < best.claimed_bound {
            best = cand;
            log_w = trial;
        } else {
            step *= 0.95;
        }
    }
    Ok(best)
}

fn best_single(a: &AlgElement, n: usize, ctx: &NormContext<'_>, opts: &PnOptions) -> Result<(Route, PnCertificate)> {
    let pol = polarization_route(a, n, ctx, opts)?;
    Ok(match scaled_power_certificate(a, n, ctx)? {
        Some(sp) if sp.claimed_bound <= pol.claimed_bound => (Route::ScaledPower, sp),
        _ => (Route::Polarization, pol),
    })
}

/// n-th power bound: the minimum over the polarization route, the
/// scaled-power route and, given a registry, the per-ideal routes.
pub fn pn_bound(a: &AlgElement, n: usize, ctx: &NormContext<'_>, opts: &PnOptions) -> Result<NormBound> {
    check_degree(n)?;
    let (mut route, mut best) = best_single(a, n, ctx, opts)?;
    if let Some(registry) = ctx.registry.filter(|r| r.is_complete()) {
        let scale = ctx.eval(a)?;
        let mut combined: Option<PnCertificate> = None;
        for comp in decompose(a, registry)? {
            if ctx.eval(&comp.element)? <= 1e-15 * scale {
                continue;
            }
            let (_, cert) = best_single(&comp.element, n, ctx, opts)?;
            combined = Some(match combined {
                None => cert,
                Some(acc) => acc.concat(&cert)?,
            });
        }
        if let Some(mut cert) = combined {
            cert.target = a.clone();
            if cert.claimed_bound < best.claimed_bound {
                route = Route::Componentwise;
                best = cert;
            }
        }
    }
    Ok(NormBound {
        lower: lower_bound(a, ctx)?,
        upper: best.claimed_bound,
        route,
        certificate: Certificate::Pn(best),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub degree: usize,
    pub lower: f64,
    pub sn_upper: f64,
    pub pn_upper: f64,
    pub pn_route: Route,
    /// nⁿ/n!
    pub slack_factor: f64,
    pub slack_bound: f64,
    pub certificates_pass: bool,
    pub pass: bool,
}

/// `lower ≤ sn_upper ≤ pn_upper ≤ (nⁿ/n!)·sn_upper + 1e-9`, every bound certificate-backed.
pub fn chain_check(a: &AlgElement, n: usize, ctx: &NormContext<'_>, opts: &PnOptions) -> Result<ChainReport> {
    let sn = sn_bound(a, n, ctx)?;
    let pn = pn_bound(a, n, ctx, opts)?;
    let certificates_pass = verify_certificate(&sn.certificate, ctx.registry, RECONSTRUCTION_TOL)?.pass
        && verify_certificate(&pn.certificate, ctx.registry, RECONSTRUCTION_TOL)?.pass;
    let slack_factor = (n as f64).powi(n as i32) / factorial(n) as f64;
    let slack_bound = slack_factor * sn.upper + CHAIN_SLACK;
    let eps = BOUND_TOL * sn.upper.max(1.0);
    let pass = certificates_pass && sn.lower <= sn.upper + eps && sn.upper <= pn.upper + eps && pn.upper <= slack_bound;
    Ok(ChainReport {
        degree: n,
        lower: sn.lower,
        sn_upper: sn.upper,
        pn_upper: pn.upper,
        pn_route: pn.route,
        slack_factor,
        slack_bound,
        certificates_pass,
        pass,
    })
}

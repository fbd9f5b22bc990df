//! Truncated harmonic analysis on the circle 𝕋 = {|z| = 1}.
//!
//! A [`TrigPoly`] stores Fourier coefficients `c_k`, `|k| ≤ cap`.
//! Convolution is the coefficientwise product, so each `χ_k(z) = z^k` is an
//! idempotent and distinct characters annihilate each other. Norms are
//! computed by quadrature at the M-th roots of unity.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::algebra::{check_exponent, DomainDescriptor, DomainNorm, FiniteAlgebra, SharedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::vec_norm2;
use crate::polynomials::{check_degree, polarize, HomPoly, OrthogonalPair, PairKind};
use crate::rng::{complex_normal, seeded};

/// Default quadrature tolerance for non-even exponents.
pub const QUADRATURE_TOL: f64 = 1e-6;

/// Finitely supported Fourier coefficients on `|k| ≤ cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    cap: usize,
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(cap: usize) -> Self {
        Self {
            cap,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * cap + 1],
        }
    }

    /// `χ_k(z) = z^k`.
    pub fn chi(k: i64, cap: usize) -> Result<Self> {
        let mut f = Self::zero(cap);
        f.set(k, Complex64::new(1.0, 0.0))?;
        Ok(f)
    }

    /// Coefficients on `k = −cap..=cap`.
    pub fn from_dense(cap: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * cap + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for cap {cap}",
                coeffs.len()
            )));
        }
        Ok(Self { cap, coeffs })
    }

    /// Smallest cap containing the support.
    pub fn from_map(map: &BTreeMap<i64, Complex64>) -> Self {
        let cap = map.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut f = Self::zero(cap);
        for (&k, &v) in map {
            f.coeffs[(k + cap as i64) as usize] = v;
        }
        f
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.cap {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.cap as i64) as usize]
        }
    }

    pub fn set(&mut self, k: i64, value: Complex64) -> Result<()> {
        if k.unsigned_abs() as usize > self.cap {
            return Err(Error::InvalidInput(format!(
                "frequency {k} outside the cap {}",
                self.cap
            )));
        }
        self.coeffs[(k + self.cap as i64) as usize] = value;
        Ok(())
    }

    pub fn frequencies(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let cap = self.cap as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - cap, c))
    }

    /// Same coefficients, zero-padded or truncated to `cap`.
    pub fn with_cap(&self, cap: usize) -> Self {
        let mut f = Self::zero(cap);
        for (k, c) in self.frequencies() {
            if k.unsigned_abs() as usize <= cap {
                f.coeffs[(k + cap as i64) as usize] = c;
            }
        }
        f
    }

    /// Coefficient ℓ² norm, equal to the L² norm by Parseval.
    pub fn coeff_l2(&self) -> f64 {
        vec_norm2(&self.coeffs)
    }

    pub fn to_file(&self) -> TrigPolyFile {
        TrigPolyFile {
            coeffs: self
                .frequencies()
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .map(|(k, c)| (k.to_string(), [c.re, c.im]))
                .collect(),
        }
    }
}

/// Wire format `{"coeffs": {"k": [re, im], ...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrigPolyFile {
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

impl TrigPolyFile {
    pub fn into_poly(self) -> Result<TrigPoly> {
        let map = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                let k = k
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidInput(format!("bad frequency {k}")))?;
                Ok((k, Complex64::new(v[0], v[1])))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(TrigPoly::from_map(&map))
    }
}

/// `(f∗g)^(k) = f̂(k) ĝ(k)`.
pub fn convolve_t(f: &TrigPoly, g: &TrigPoly) -> TrigPoly {
    let cap = f.cap.max(g.cap);
    let mut out = TrigPoly::zero(cap);
    for k in -(f.cap.min(g.cap) as i64)..=(f.cap.min(g.cap) as i64) {
        out.coeffs[(k + cap as i64) as usize] = f.coeff(k) * g.coeff(k);
    }
    out
}

/// `M` uniform points `z_j = e^{2πij/M}` on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Grid {
    pub points: usize,
}

impl Grid {
    pub fn new(points: usize) -> Self {
        Self { points }
    }

    /// Minimal oversampled grid for frequencies up to `cap`.
    pub fn minimal(cap: usize) -> Self {
        Self::new(4 * (cap + 1))
    }

    /// The grid used by the diagnostics: `max(64(cap+1), 16384)` rounded up
    /// to a power of two.
    pub fn diagnostic(cap: usize) -> Self {
        Self::new((64 * (cap + 1)).max(16384).next_power_of_two())
    }

    fn check(&self, cap: usize) -> Result<()> {
        let required = 4 * (cap + 1);
        if self.points < required {
            Err(Error::UnderSampled {
                points: self.points,
                cap,
                required,
            })
        } else {
            Ok(())
        }
    }
}

/// Values `f(z_j) = Σ_k c_k z_j^k` on the grid.
pub fn sample(f: &TrigPoly, grid: Grid) -> Result<Vec<Complex64>> {
    grid.check(f.cap)?;
    let m = grid.points;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (k, c) in f.frequencies() {
        buf[k.rem_euclid(m as i64) as usize] += c;
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    Ok(buf)
}

/// `((1/M) Σ_j |f(z_j)|^p)^{1/p}`; `p = ∞` gives the grid maximum.
pub fn lp_norm_t(f: &TrigPoly, p: f64, grid: Grid) -> Result<f64> {
    check_exponent(p)?;
    let values = sample(f, grid)?;
    if p.is_infinite() {
        return Ok(values.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let mean = values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / values.len() as f64;
    Ok(mean.powf(1.0 / p))
}

/// Fejér kernel `F_m` with `α_m(k) = 1 − |k|/(m+1)` on `|k| ≤ m`.
pub fn fejer(m: usize) -> TrigPoly {
    let mut f = TrigPoly::zero(m);
    for k in -(m as i64)..=(m as i64) {
        f.coeffs[(k + m as i64) as usize] = Complex64::new(fejer_weight(m, k), 0.0);
    }
    f
}

pub fn fejer_weight(m: usize, k: i64) -> f64 {
    let k = k.unsigned_abs() as f64;
    if k > m as f64 {
        0.0
    } else {
        1.0 - k / (m as f64 + 1.0)
    }
}

/// Dirichlet kernel `D_N = Σ_{|k|≤N} χ_k`.
pub fn dirichlet(n: usize) -> TrigPoly {
    TrigPoly::from_dense(n, vec![Complex64::new(1.0, 0.0); 2 * n + 1]).expect("length 2n+1")
}

/// One-sided kernel `K_N = Σ_{k=0}^{N} χ_k`.
pub fn one_sided(n: usize) -> TrigPoly {
    let mut f = TrigPoly::zero(n);
    for k in 0..=n {
        f.coeffs[k + n] = Complex64::new(1.0, 0.0);
    }
    f
}

/// Trigonometric polynomials with `|k| ≤ cap` as a finite-dimensional algebra.
#[derive(Clone, Copy, Debug)]
pub struct TrigAlgebra {
    cap: usize,
}

impl TrigAlgebra {
    pub fn new(cap: usize) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn poly(&self, x: &[Complex64]) -> TrigPoly {
        TrigPoly::from_dense(self.cap, x.to_vec()).expect("coordinate length is 2cap+1")
    }
}

impl FiniteAlgebra for TrigAlgebra {
    fn dim(&self) -> usize {
        2 * self.cap + 1
    }

    fn multiply(&self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        a.iter().zip(b).map(|(x, y)| x * y).collect()
    }

    /// `Σ_{|k|≤cap} χ_k`, the identity of the truncated algebra.
    fn unit(&self) -> Option<Vec<Complex64>> {
        Some(vec![Complex64::new(1.0, 0.0); self.dim()])
    }

    fn descriptor(&self) -> DomainDescriptor {
        DomainDescriptor::Trig { cap: self.cap }
    }

    fn norm(&self, x: &[Complex64], which: DomainNorm) -> Result<f64> {
        match which {
            DomainNorm::Lp(p) => lp_norm_t(&self.poly(x), p, Grid::diagnostic(self.cap)),
            DomainNorm::Linf => lp_norm_t(&self.poly(x), f64::INFINITY, Grid::diagnostic(self.cap)),
            DomainNorm::Euclidean => Ok(vec_norm2(x)),
            DomainNorm::Operator => Err(Error::UnsupportedNorm {
                norm: which.to_string(),
                domain: self.descriptor().to_string(),
            }),
        }
    }

    /// `|f̂(k)| ≤ ‖f‖₁ ≤ ‖f‖_p`.
    fn coordinate_bound(&self, which: DomainNorm) -> Result<f64> {
        match which {
            DomainNorm::Lp(p) => check_exponent(p).map(|_| 1.0),
            DomainNorm::Linf | DomainNorm::Euclidean => Ok(1.0),
            DomainNorm::Operator => Err(Error::UnsupportedNorm {
                norm: which.to_string(),
                domain: self.descriptor().to_string(),
            }),
        }
    }
}

/// `P(f) = Σ_k w_k f̂(k)ⁿ` over the trigonometric polynomials of degree ≤ `cap`.
pub fn model_polynomial(weights: &TrigPoly, n: usize, cap: usize) -> Result<HomPoly> {
    check_degree(n)?;
    let w = weights.with_cap(cap);
    let alg: SharedAlgebra = Arc::new(TrigAlgebra::new(cap));
    HomPoly::black_box(alg, n, 1, move |x| {
        vec![x.iter().zip(w.coeffs()).map(|(c, wk)| wk * c.powu(n as u32)).sum()]
    })
}

/// Pairs with disjoint frequency supports (zero products coefficientwise),
/// led by the zero pair.
pub fn cross_frequency_pairs(cap: usize, count: usize, seed: u64) -> Vec<OrthogonalPair> {
    let dim = 2 * cap + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut rng = seeded(seed);
    let mut pairs = Vec::with_capacity(count);
    if count > 0 {
        pairs.push(OrthogonalPair {
            f: (0..dim).map(|_| complex_normal(&mut rng)).collect(),
            g: vec![zero; dim],
            kind: PairKind::Zero,
        });
    }
    while pairs.len() < count {
        let mut f = vec![zero; dim];
        let mut g = vec![zero; dim];
        for i in 0..dim {
            match rng.random_range(0..3u8) {
                0 => f[i] = complex_normal(&mut rng),
                1 => g[i] = complex_normal(&mut rng),
                _ => {}
            }
        }
        pairs.push(OrthogonalPair {
            f,
            g,
            kind: PairKind::CrossIdeal,
        });
    }
    pairs
}

#[derive(Clone, Debug, Serialize)]
pub struct FejerRow {
    pub m: usize,
    /// φ(f, F_m, …, F_m) through the polarization formula
    pub value: Complex64,
    /// Σ_k w_k f̂(k) α_m(k)^{n−1}
    pub closed_form: Complex64,
    /// |value − Φ₀(f)|
    pub error: f64,
    pub closed_form_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FejerReport {
    pub degree: usize,
    /// Φ₀(f) = Σ_k w_k f̂(k)
    pub limit: Complex64,
    pub rows: Vec<FejerRow>,
    pub monotone: bool,
    pub pass: bool,
}

/// `φ(f, F_m, …, F_m) → Φ₀(f)` for the model polynomial with weights `w`.
pub fn fejer_limit_check(weights: &TrigPoly, f: &TrigPoly, n: usize, m_list: &[usize]) -> Result<FejerReport> {
    check_degree(n)?;
    let limit: Complex64 = f.frequencies().map(|(k, c)| weights.coeff(k) * c).sum();
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let cap = m.max(f.cap).max(weights.cap);
        let p = model_polynomial(weights, n, cap)?;
        let phi = polarize(&p)?;
        let fk = fejer(m).with_cap(cap);
        let ff = f.with_cap(cap);
        let mut args: Vec<&[Complex64]> = vec![fk.coeffs(); n];
        args[0] = ff.coeffs();
        let value = phi.eval(&args)[0];
        let closed_form: Complex64 = f
            .frequencies()
            .map(|(k, c)| weights.coeff(k) * c * fejer_weight(m, k).powi(n as i32 - 1))
            .sum();
        rows.push(FejerRow {
            m,
            value,
            closed_form,
            error: (value - limit).norm(),
            closed_form_residual: (value - closed_form).norm(),
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].error <= w[0].error + 1e-12);
    let tol = 1e-12 * (1.0 + limit.norm());
    let pass = monotone && rows.iter().all(|r| r.closed_form_residual <= tol);
    Ok(FejerReport {
        degree: n,
        limit,
        rows,
        monotone,
        pass,
    })
}

/// Coefficients `ĥ(k)` for the first diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub enum HCoeffs {
    /// `ĥ(0) = 1`, `ĥ(k) = |k|^{−1/s}`.
    PowerLaw,
    /// `ĥ(0) = 1`, all other coefficients zero.
    Control,
    /// Moduli `|ĥ(k)|` for `k ≥ 0`, mirrored to negative `k`; zero beyond the list.
    Symmetric(Vec<f64>),
}

impl HCoeffs {
    fn modulus(&self, k: i64, s: f64) -> f64 {
        let a = k.unsigned_abs() as usize;
        match self {
            Self::PowerLaw if a == 0 => 1.0,
            Self::PowerLaw => (a as f64).powf(-1.0 / s),
            Self::Control => f64::from(u8::from(a == 0)),
            Self::Symmetric(v) => v.get(a).copied().unwrap_or(0.0),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Ca11Row {
    pub m: usize,
    /// ‖φ_m‖ = (Σ_{|k|≤m} |ĥ(k)|^s)^{1/s}
    pub norm: f64,
    /// ‖φ_m‖^s
    pub harmonic_sum: f64,
    /// ‖φ_m‖^s − 2 ln m
    pub companion: f64,
    /// |Σ ĥ(k) a(k)| / ‖a‖_r for the extremal a(k) = |ĥ(k)|^{s−1}
    pub attained: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ca11Report {
    pub p: f64,
    pub q: f64,
    pub s: f64,
    pub r: f64,
    pub rows: Vec<Ca11Row>,
    pub strictly_increasing: bool,
    /// spread of the companion column over rows with m ≥ 100
    pub companion_oscillation: Option<f64>,
    pub pass: bool,
}

/// Growth of `‖φ_m‖` in `(ℓ^r)*` = ℓ^s, with `q = p/(p−1)`, `s = q/2`,
/// `r = p/(2−p)`.
pub fn diagnostic_ca11(p: f64, h: &HCoeffs, m_list: &[usize]) -> Result<Ca11Report> {
    if !(p > 1.0 && p < 2.0) {
        return Err(Error::BadExponent(p));
    }
    let q = p / (p - 1.0);
    let s = q / 2.0;
    let r = p / (2.0 - p);
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let mut sum = 0.0;
        let mut pairing = 0.0;
        let mut a_r = 0.0;
        // ascending moduli order keeps the harmonic sum accurate
        for a in (0..=m as i64).rev() {
            let h_abs = h.modulus(a, s);
            let copies = if a == 0 { 1.0 } else { 2.0 };
            let hs = h_abs.powf(s);
            sum += copies * hs;
            let ak = h_abs.powf(s - 1.0);
            pairing += copies * h_abs * ak;
            a_r += copies * ak.powf(r);
        }
        let norm = sum.powf(1.0 / s);
        let attained = if a_r > 0.0 { pairing / a_r.powf(1.0 / r) } else { 0.0 };
        rows.push(Ca11Row {
            m,
            norm,
            harmonic_sum: sum,
            companion: sum - 2.0 * (m.max(1) as f64).ln(),
            attained,
        });
    }
    let strictly_increasing = rows.len() >= 2 && rows.windows(2).all(|w| w[1].norm > w[0].norm);
    let late: Vec<f64> = rows.iter().filter(|r| r.m >= 100).map(|r| r.companion).collect();
    let companion_oscillation = (!late.is_empty()).then(|| {
        late.iter().copied().fold(f64::NEG_INFINITY, f64::max) - late.iter().copied().fold(f64::INFINITY, f64::min)
    });
    let pass = strictly_increasing && companion_oscillation.is_none_or(|o| o < 0.5);
    Ok(Ca11Report {
        p,
        q,
        s,
        r,
        rows,
        strictly_increasing,
        companion_oscillation,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Ca12Row {
    pub n: usize,
    /// ‖D_N‖_q
    pub norm: f64,
    /// ‖D_{4N}‖_q
    pub norm_4n: f64,
    pub ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ca12Report {
    pub p: f64,
    pub q: f64,
    pub rows: Vec<Ca12Row>,
    pub strictly_increasing: bool,
    pub pass: bool,
}

pub const CA12_RATIO: f64 = 1.3;

/// Growth of the truncated Dirichlet kernels in `L^q`, `q = p/(p−1)`.
pub fn diagnostic_ca12(p: f64, n_list: &[usize]) -> Result<Ca12Report> {
    if p.is_nan() || p < 2.0 || p.is_infinite() {
        return Err(Error::BadExponent(p));
    }
    let q = p / (p - 1.0);
    let rows = n_list
        .iter()
        .map(|&n| {
            let norm = lp_norm_t(&dirichlet(n), q, Grid::diagnostic(n))?;
            let norm_4n = lp_norm_t(&dirichlet(4 * n), q, Grid::diagnostic(4 * n))?;
            let ratio = norm_4n / norm;
            Ok(Ca12Row {
                n,
                norm,
                norm_4n,
                ratio,
                threshold: CA12_RATIO,
                pass: ratio >= CA12_RATIO,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_increasing = rows.windows(2).all(|w| w[1].n <= w[0].n || w[1].norm > w[0].norm);
    let pass = strictly_increasing && rows.iter().all(|r| r.pass);
    Ok(Ca12Report {
        p,
        q,
        rows,
        strictly_increasing,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LinfRow {
    pub n: usize,
    /// ‖K_N‖₁
    pub norm: f64,
    /// 0.3 ln N (0 for N ≤ 1)
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinfReport {
    pub rows: Vec<LinfRow>,
    pub monotone: bool,
    pub pass: bool,
}

/// Growth of `‖Σ_{k=0}^{N} χ_k‖₁`.
pub fn diagnostic_linf(n_list: &[usize]) -> Result<LinfReport> {
    let rows = n_list
        .iter()
        .map(|&n| {
            let norm = lp_norm_t(&one_sided(n), 1.0, Grid::diagnostic(n))?;
            let threshold = 0.3 * (n.max(1) as f64).ln();
            Ok(LinfRow {
                n,
                norm,
                threshold,
                pass: norm >= threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = rows.windows(2).all(|w| w[1].n <= w[0].n || w[1].norm > w[0].norm);
    let pass = monotone && rows.iter().all(|r| r.pass);
    Ok(LinfReport { rows, monotone, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use crate::polynomials::check_orthogonal_additivity;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn eval_at(f: &TrigPoly, theta: f64) -> Complex64 {
        f.frequencies()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    #[test]
    fn characters_are_orthogonal_idempotents() {
        let x3 = TrigPoly::chi(3, 5).unwrap();
        let x2 = TrigPoly::chi(-2, 5).unwrap();
        assert_eq!(convolve_t(&x3, &x3), x3);
        assert_eq!(convolve_t(&x3, &x2), TrigPoly::zero(5));
        let mut f = TrigPoly::zero(1);
        f.set(0, c(1.0)).unwrap();
        f.set(1, c(2.0)).unwrap();
        let sq = convolve_t(&f, &f);
        assert_eq!((sq.coeff(0), sq.coeff(1), sq.coeff(-1)), (c(1.0), c(4.0), c(0.0)));
    }

    #[test]
    fn convolution_matches_grid_convolution() {
        // oracle: (f∗g)(z_j) = (1/M) Σ_l f(z_l) g(z_{j−l})
        let mut rng = seeded(1);
        let f = TrigPoly::from_dense(3, (0..7).map(|_| complex_normal(&mut rng)).collect()).unwrap();
        let g = TrigPoly::from_dense(3, (0..7).map(|_| complex_normal(&mut rng)).collect()).unwrap();
        let grid = Grid::minimal(3);
        let fv = sample(&f, grid).unwrap();
        let gv = sample(&g, grid).unwrap();
        let hv = sample(&convolve_t(&f, &g), grid).unwrap();
        let m = grid.points;
        for j in 0..m {
            let direct: Complex64 = (0..m).map(|l| fv[l] * gv[(j + m - l) % m]).sum::<Complex64>() / m as f64;
            assert!((direct - hv[j]).norm() < 1e-8);
        }
    }

    #[test]
    fn sampling_matches_direct_evaluation() {
        let f = fejer(4);
        let grid = Grid::new(40);
        let vals = sample(&f, grid).unwrap();
        for (j, v) in vals.iter().enumerate() {
            assert!((eval_at(&f, 2.0 * PI * j as f64 / 40.0) - v).norm() < 1e-12);
        }
    }

    #[test]
    fn fejer_coefficients_and_mass() {
        assert_eq!(fejer(0), TrigPoly::chi(0, 0).unwrap());
        let f2 = fejer(2);
        let expected = [1.0 / 3.0, 2.0 / 3.0, 1.0, 2.0 / 3.0, 1.0 / 3.0];
        for (a, b) in f2.coeffs().iter().zip(expected) {
            assert!((a - c(b)).norm() < 1e-15);
        }
        for m in [2, 10, 50] {
            let norm = lp_norm_t(&fejer(m), 1.0, Grid::diagnostic(m)).unwrap();
            assert!((norm - 1.0).abs() < 1e-8, "m={m}: {norm}");
            let x5 = TrigPoly::chi(5, m.max(5)).unwrap();
            let prod = convolve_t(&fejer(m), &x5);
            assert_eq!(prod.coeff(5), c(fejer_weight(m, 5)));
        }
    }

    #[test]
    fn norms_of_characters_and_parseval() {
        let x = TrigPoly::chi(7, 7).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            assert!((lp_norm_t(&x, p, Grid::minimal(7)).unwrap() - 1.0).abs() < 1e-12);
        }
        let d = dirichlet(12);
        assert!((lp_norm_t(&d, 2.0, Grid::minimal(12)).unwrap() - 5.0).abs() < 1e-8);
        let mut rng = seeded(2);
        let f = TrigPoly::from_dense(9, (0..19).map(|_| complex_normal(&mut rng)).collect()).unwrap();
        assert!((lp_norm_t(&f, 2.0, Grid::minimal(9)).unwrap() - f.coeff_l2()).abs() < 1e-8);
    }

    #[test]
    fn undersampled_grid_is_rejected() {
        assert!(matches!(
            lp_norm_t(&dirichlet(10), 2.0, Grid::new(40)),
            Err(Error::UnderSampled { required: 44, .. })
        ));
    }

    #[test]
    fn fejer_limit_examples() {
        let w = TrigPoly::chi(5, 5).unwrap();
        let f = TrigPoly::chi(5, 5).unwrap();
        let rep = fejer_limit_check(&w, &f, 2, &[9, 99, 999]).unwrap();
        assert!((rep.rows[0].value - c(0.5)).norm() < 1e-12);
        for row in &rep.rows {
            assert!((row.error - 5.0 / (row.m as f64 + 1.0)).abs() < 1e-12);
        }
        assert!(rep.pass);

        let f0 = TrigPoly::chi(0, 0).unwrap();
        let w0 = TrigPoly::chi(0, 0).unwrap();
        let rep = fejer_limit_check(&w0, &f0, 3, &[0, 1, 10]).unwrap();
        assert!(rep.rows.iter().all(|r| r.error < 1e-14));
    }

    #[test]
    fn model_polynomial_is_additive_on_cross_frequency_pairs() {
        let mut rng = seeded(3);
        let w = TrigPoly::from_dense(6, (0..13).map(|_| complex_normal(&mut rng)).collect()).unwrap();
        for n in 2..=4 {
            let p = model_polynomial(&w, n, 6).unwrap();
            let pairs = cross_frequency_pairs(6, 100, 4);
            assert_eq!(pairs[0].kind, PairKind::Zero);
            assert!(check_orthogonal_additivity(&p, &pairs, 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn ca11_harmonic_sums() {
        let rep = diagnostic_ca11(1.5, &HCoeffs::PowerLaw, &[10, 100, 1000]).unwrap();
        assert!((rep.s - 1.5).abs() < 1e-15);
        let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
        assert!((rep.rows[0].harmonic_sum - (1.0 + 2.0 * h10)).abs() < 1e-10);
        let step = rep.rows[2].harmonic_sum - rep.rows[1].harmonic_sum;
        assert!((step - 2.0 * 10f64.ln()).abs() < 0.1);
        for row in &rep.rows {
            assert!((row.attained - row.norm).abs() < 1e-10 * row.norm);
        }
        assert!(rep.pass);

        let control = diagnostic_ca11(1.5, &HCoeffs::Control, &[10, 100, 1000]).unwrap();
        assert!(control.rows.iter().all(|r| (r.norm - 1.0).abs() < 1e-15));
        assert!(!control.pass);
        assert!(matches!(
            diagnostic_ca11(2.0, &HCoeffs::PowerLaw, &[1]),
            Err(Error::BadExponent(_))
        ));
    }

    #[test]
    fn ca12_growth() {
        let rep = diagnostic_ca12(2.0, &[12]).unwrap();
        assert!((rep.rows[0].norm - 5.0).abs() < 1e-8);
        assert!((rep.rows[0].ratio - (97.0f64 / 25.0).sqrt()).abs() < 1e-8);
        let rep = diagnostic_ca12(3.0, &[16, 64, 256]).unwrap();
        assert!((rep.q - 1.5).abs() < 1e-15);
        assert!(rep.pass, "{rep:?}");
        assert!(diagnostic_ca12(1.5, &[4]).is_err());
    }

    #[test]
    fn linf_growth() {
        let rep = diagnostic_linf(&[0, 1, 64, 256, 1024]).unwrap();
        assert!((rep.rows[0].norm - 1.0).abs() < 1e-12);
        assert!((rep.rows[1].norm - 4.0 / PI).abs() < 1e-6);
        assert!(rep.pass, "{rep:?}");
    }
}

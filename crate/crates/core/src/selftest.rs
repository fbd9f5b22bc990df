//! Seeded invariant suites across all modules, summarized as one report.
//! The report contains no timings, so equal seeds give equal reports.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{GroupAlgebra, MatrixAlgebra, SharedAlgebra};
use crate::circle::{
    convolve_t, diagnostic_ca11, diagnostic_ca12, diagnostic_linf, fejer, fejer_limit_check, fejer_weight, lp_norm_t,
    Grid, HCoeffs, TrigPoly,
};
use crate::error::Result;
use crate::fourier::BanachNorm;
use crate::fourier::{central_idempotents, convolve, decompose, fourier, inverse_fourier, AlgElement};
use crate::group::{builtin_by_name, validate_group, validate_irreps, Tolerances, BUILTIN_NAMES};
use crate::pnorms::{chain_check, sn_bound, NormContext, PnOptions};
use crate::polynomials::{
    check_orthogonal_additivity, orthogonal_pairs, polarize, HomPoly, OaddOutcome, PairDomain, PairSuite,
};
use crate::represent::{block_trace_then_power, phi_group, phi_group_blockwise, prototypical, span_check, LinearMap};
use crate::rng::{seeded, split};
use crate::{Complex64, LINEAR_TOL, QUADRATIC_TOL};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<Suite>,
    pub pass: bool,
}

#[derive(Default)]
struct Builder {
    checks: Vec<Check>,
}

impl Builder {
    /// value ≤ threshold
    fn at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
        });
    }

    /// value ≥ threshold
    fn at_least(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
        });
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.at_least(name, f64::from(u8::from(ok)), 1.0);
    }

    fn finish(self, name: &str) -> Suite {
        Suite {
            name: name.to_string(),
            pass: self.checks.iter().all(|c| c.pass),
            checks: self.checks,
        }
    }
}

fn group_suite() -> Result<Suite> {
    let mut b = Builder::default();
    for name in BUILTIN_NAMES {
        let (g, r) = builtin_by_name(name)?;
        b.at_most(
            format!("{name}/axiom_violations"),
            validate_group(&g).total_violations as f64,
            0.0,
        );
        let rep = validate_irreps(&g, &r, &Tolerances::default())?;
        b.flag(format!("{name}/irreps_valid"), rep.pass());
        b.at_most(
            format!("{name}/regular_character"),
            rep.regular_character_residual,
            QUADRATIC_TOL,
        );
    }
    Ok(b.finish("group"))
}

fn fourier_suite(seed: u64) -> Result<Suite> {
    let mut b = Builder::default();
    let mut rng = seeded(seed);
    for name in BUILTIN_NAMES {
        let (g, r) = builtin_by_name(name)?;
        let idem = central_idempotents(&r);
        let mut idempotency: f64 = 0.0;
        let mut cross: f64 = 0.0;
        for (i, e) in idem.iter().enumerate() {
            idempotency = idempotency.max((&convolve(e, e)? - e).max_abs());
            for f in &idem[i + 1..] {
                cross = cross.max(convolve(e, f)?.max_abs()).max(convolve(f, e)?.max_abs());
            }
        }
        let mut recon: f64 = 0.0;
        let mut round: f64 = 0.0;
        for _ in 0..20 {
            let f = AlgElement::random(&g, &mut rng);
            let sum = decompose(&f, &r)?
                .iter()
                .fold(AlgElement::zero(&g), |acc, c| &acc + &c.element);
            recon = recon.max((&sum - &f).max_abs());
            round = round.max((&inverse_fourier(&fourier(&f, &r)?, &r)? - &f).max_abs());
        }
        b.at_most(format!("{name}/idempotency"), idempotency, LINEAR_TOL);
        b.at_most(format!("{name}/cross_annihilation"), cross, LINEAR_TOL);
        b.at_most(format!("{name}/reconstruction"), recon, LINEAR_TOL);
        b.at_most(format!("{name}/round_trip"), round, LINEAR_TOL);
    }
    Ok(b.finish("fourier"))
}

fn polynomial_suite(seed: u64) -> Result<Suite> {
    let mut b = Builder::default();
    let one: SharedAlgebra = Arc::new(MatrixAlgebra::new(1));
    let square = HomPoly::black_box(one, 2, 1, |x| vec![x[0] * x[0]])?;
    let phi = polarize(&square)?;
    let v = phi.eval(&[&[Complex64::new(2.0, 0.0)], &[Complex64::new(3.0, 0.0)]])[0];
    b.at_most("square/polarized_product", (v - 6.0).norm(), 1e-9);

    let m2: SharedAlgebra = Arc::new(MatrixAlgebra::new(2));
    let trace_sq = HomPoly::black_box(Arc::clone(&m2), 2, 1, |x| {
        vec![x[0] * x[0] + 2.0 * x[1] * x[2] + x[3] * x[3]]
    })?;
    let trace_then_sq = HomPoly::black_box(m2, 2, 1, |x| vec![(x[0] + x[3]) * (x[0] + x[3])])?;
    let pairs = orthogonal_pairs(PairDomain::Matrix(2), 100, seed, PairSuite::Full)?;
    let ok = check_orthogonal_additivity(&trace_sq, &pairs, 1e-9)?;
    b.flag("m2/trace_square_additive", ok.passed());
    let residual = match check_orthogonal_additivity(&trace_then_sq, &pairs, 1e-9)? {
        OaddOutcome::Counterexample(c) => c.residual,
        OaddOutcome::Pass { .. } => 0.0,
    };
    b.at_least("m2/trace_then_square_residual", residual, 0.5);

    let (g, r) = builtin_by_name("s3")?;
    let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
    let mut rng = seeded(split(seed, 1));
    let phi0 = LinearMap::random(&mut rng, crate::algebra::FiniteAlgebra::descriptor(alg.as_ref()), 1);
    let proto = prototypical(alg, 3, &phi0)?;
    let pairs = orthogonal_pairs(PairDomain::Group(&r), 200, split(seed, 2), PairSuite::Full)?;
    b.flag(
        "s3/prototypical_additive",
        check_orthogonal_additivity(&proto, &pairs, 1e-9)?.passed(),
    );
    Ok(b.finish("polynomials"))
}

fn represent_suite(seed: u64) -> Result<Suite> {
    let mut b = Builder::default();
    let mut rng = seeded(seed);
    for name in ["z6", "s3", "d4", "q8"] {
        let (g, r) = builtin_by_name(name)?;
        let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(Arc::clone(&g)));
        let domain = crate::algebra::FiniteAlgebra::descriptor(alg.as_ref());
        for n in [2, 3] {
            let mut err: f64 = 0.0;
            let mut agree: f64 = 0.0;
            for _ in 0..3 {
                let phi0 = LinearMap::random(&mut rng, domain.clone(), 1);
                let p = prototypical(Arc::clone(&alg), n, &phi0)?;
                let phi = phi_group(&p, &r)?;
                err = err.max(phi.max_entry_diff(&phi0));
                agree = agree.max(phi_group_blockwise(&p, &r)?.max_entry_diff(&phi));
            }
            b.at_most(format!("{name}/n{n}/round_trip"), err, 1e-9);
            b.at_most(format!("{name}/n{n}/path_agreement"), agree, 1e-10);
        }
        let negative = if g.is_abelian() {
            crate::represent::total_trace_then_power(&g, 2)?
        } else {
            block_trace_then_power(&r, 2)?
        };
        b.flag(
            format!("{name}/negative_control_rejected"),
            phi_group(&negative, &r).is_err(),
        );
    }
    for name in BUILTIN_NAMES {
        let (g, _) = builtin_by_name(name)?;
        for n in [2, 3] {
            let rep = span_check(&g, n, split(seed, n as u64))?;
            b.at_least(format!("{name}/n{n}/span_rank"), rep.rank as f64, g.order() as f64);
        }
    }
    Ok(b.finish("represent"))
}

fn pnorm_suite(seed: u64) -> Result<Suite> {
    let mut b = Builder::default();
    let mut rng = seeded(seed);
    for name in ["z4", "s3", "q8"] {
        let (g, r) = builtin_by_name(name)?;
        let ctx = NormContext::new(BanachNorm::L1, Some(&r));
        for n in [2, 3] {
            let mut gap: f64 = 0.0;
            let mut chain = true;
            for _ in 0..10 {
                let a = AlgElement::random(&g, &mut rng);
                let sn = sn_bound(&a, n, &ctx)?;
                gap = gap
                    .max((sn.upper - a.l1_norm()).abs())
                    .max((sn.lower - a.l1_norm()).abs());
                chain &= chain_check(&a, n, &ctx, &PnOptions::default())?.pass;
            }
            b.at_most(format!("{name}/n{n}/sn_equals_l1"), gap, LINEAR_TOL);
            b.flag(format!("{name}/n{n}/chain"), chain);
        }
    }
    Ok(b.finish("pnorms"))
}

fn circle_suite() -> Result<Suite> {
    let mut b = Builder::default();
    for m in [2, 10, 50] {
        let mass = lp_norm_t(&fejer(m), 1.0, Grid::diagnostic(m))?;
        b.at_most(format!("fejer{m}/mass"), (mass - 1.0).abs(), 1e-8);
        let chi = TrigPoly::chi(3, m.max(3))?;
        let coeff = convolve_t(&fejer(m), &chi).coeff(3);
        b.at_most(format!("fejer{m}/multiplier"), (coeff - fejer_weight(m, 3)).norm(), 0.0);
    }
    let x5 = TrigPoly::chi(5, 5)?;
    let rep = fejer_limit_check(&x5, &x5, 2, &[9, 99, 999])?;
    let err = rep
        .rows
        .iter()
        .map(|r| (r.error - 5.0 / (r.m as f64 + 1.0)).abs())
        .fold(0.0, f64::max);
    b.at_most("fejer_limit/error_closed_form", err, LINEAR_TOL);
    b.flag("fejer_limit/monotone", rep.pass);

    let ca11 = diagnostic_ca11(1.5, &HCoeffs::PowerLaw, &[10, 100, 1000])?;
    let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
    b.at_most(
        "ca11/harmonic_sum_10",
        (ca11.rows[0].harmonic_sum - 1.0 - 2.0 * h10).abs(),
        1e-10,
    );
    b.flag("ca11/divergent", ca11.pass);
    let ca12 = diagnostic_ca12(2.0, &[12, 48])?;
    b.at_most("ca12/parseval_12", (ca12.rows[0].norm - 5.0).abs(), 1e-8);
    b.flag("ca12/divergent", ca12.pass);
    let linf = diagnostic_linf(&[1, 64, 256])?;
    b.at_most(
        "linf/four_over_pi",
        (linf.rows[0].norm - 4.0 / std::f64::consts::PI).abs(),
        1e-6,
    );
    b.flag("linf/divergent", linf.pass);
    Ok(b.finish("circle"))
}

/// Runs every suite; sub-seeds are split from `seed`.
pub fn run(seed: u64) -> Result<SelftestReport> {
    let suites = vec![
        group_suite()?,
        fourier_suite(split(seed, 1))?,
        polynomial_suite(split(seed, 2))?,
        represent_suite(split(seed, 3))?,
        pnorm_suite(split(seed, 4))?,
        circle_suite()?,
    ];
    Ok(SelftestReport {
        seed,
        pass: suites.iter().all(|s| s.pass),
        suites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes_and_is_deterministic() {
        let a = run(42).unwrap();
        for suite in &a.suites {
            for c in &suite.checks {
                assert!(c.pass, "{}: {} vs {}", c.name, c.value, c.threshold);
            }
        }
        let b = run(42).unwrap();
        let ja = crate::canon::to_canonical_json(&a).unwrap();
        let jb = crate::canon::to_canonical_json(&b).unwrap();
        assert_eq!(ja, jb);
    }
}

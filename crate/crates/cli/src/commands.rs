use std::path::Path;
use std::sync::Arc;

use oapoly::algebra::{DomainDescriptor, GroupAlgebra, MatrixAlgebra, SharedAlgebra};
use oapoly::circle::{
    cross_frequency_pairs, diagnostic_ca11, diagnostic_ca12, diagnostic_linf, fejer, fejer_limit_check, lp_norm_t,
    Grid, HCoeffs, TrigAlgebra, TrigPoly,
};
use oapoly::fourier::{fourier, inverse_fourier, AlgElement, AlgElementJson, BanachNorm};
use oapoly::group::{
    builtin_by_name, validate_group, validate_irreps, GroupFile, GroupTable, IrrepRegistry, Tolerances,
};
use oapoly::linalg::to_pairs;
use oapoly::pnorms::{
    chain_check, pn_bound, sn_bound, verify_certificate, CertificateFile, NormContext, PnOptions, RECONSTRUCTION_TOL,
};
use oapoly::polynomials::{
    check_orthogonal_additivity, orthogonal_pairs, HomPoly, PairDomain, PairSuite, PolynomialFile,
};
use oapoly::represent::{
    block_power_trace, block_trace_then_power, extract, span_check, total_trace_then_power, verify_representation,
    ExtractOptions, LinearMapFile, DEFAULT_VERIFY_TOL,
};
use oapoly::{selftest, Complex64, LINEAR_TOL};
use serde_json::{json, to_value, Value};

use crate::io::{num, read_json, Body, CliError, Output, Table};
use crate::{
    CertKind, CircleCmd, Cli, Command, Example, FourierCmd, GroupCmd, GroupSource, Model, NormsCmd, OaddCmd,
    PolySource, RepresentCmd, SuiteArg,
};

type CliResult<T> = Result<T, CliError>;

fn value<T: serde::Serialize>(x: &T) -> CliResult<Value> {
    to_value(x).map_err(|e| CliError::from(oapoly::Error::from(e)))
}

fn json_only(json: Value, pass: bool) -> Output {
    Output {
        body: Body { json, table: None },
        pass,
    }
}

fn with_table(json: Value, table: Table, pass: bool) -> Output {
    Output {
        body: Body {
            json,
            table: Some(table),
        },
        pass,
    }
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    match &cli.command {
        Command::Group(GroupCmd::Validate(src)) => group_validate(src),
        Command::Group(GroupCmd::Info(src)) => group_info(src),
        Command::Fourier(FourierCmd::Transform { source, input }) => fourier_transform(cli, source, input.as_deref()),
        Command::Oadd(OaddCmd::Check {
            source,
            poly,
            pairs,
            suite,
        }) => oadd_check(cli, source, poly, *pairs, *suite),
        Command::Represent(RepresentCmd::Extract { source, poly, pairs }) => {
            represent_extract(cli, source, poly, *pairs)
        }
        Command::Represent(RepresentCmd::Verify {
            source,
            poly,
            phi,
            samples,
        }) => represent_verify(cli, source, poly, phi, *samples),
        Command::Represent(RepresentCmd::Span { source, n }) => represent_span(cli, source, *n),
        Command::Norms(NormsCmd::Certify {
            source,
            input,
            verify,
            n,
            kind,
            norm,
            refine,
        }) => norms_certify(
            cli,
            source,
            input.as_deref(),
            verify.as_deref(),
            *n,
            *kind,
            norm,
            *refine,
        ),
        Command::Norms(NormsCmd::Chain { source, n, count }) => norms_chain(cli, source, *n, *count),
        Command::Circle(CircleCmd::Fejer { m, k, n }) => circle_fejer(cli, m, *k, *n),
        Command::Circle(CircleCmd::Diagnose {
            example,
            p,
            q,
            m,
            n_list,
            control,
        }) => circle_diagnose(*example, *p, *q, m.as_deref(), n_list.as_deref(), *control),
        Command::Selftest => {
            let report = selftest::run(cli.seed)?;
            Ok(json_only(value(&report)?, report.pass))
        }
    }
}

fn load_raw(src: &GroupSource) -> CliResult<(Arc<GroupTable>, IrrepRegistry)> {
    match (&src.group, &src.group_file) {
        (Some(name), None) => Ok(builtin_by_name(name)?),
        (None, Some(path)) => Ok(read_json::<GroupFile>(path)?.into_registry()?),
        _ => Err(CliError::usage("give exactly one of --group and --group-file")),
    }
}

/// Group and registry, rejected as input unless both validate.
fn load(src: &GroupSource) -> CliResult<(Arc<GroupTable>, IrrepRegistry)> {
    let (g, r) = load_raw(src)?;
    if src.group_file.is_some() {
        let report = validate_group(&g);
        if !report.is_valid() {
            return Err(CliError::usage(format!(
                "{}: not a group ({} axiom violations)",
                g.name(),
                report.total_violations
            )));
        }
        let irreps = validate_irreps(&g, &r, &Tolerances::default())?;
        if !irreps.pass() {
            return Err(CliError::usage(format!(
                "{}: irrep registry failed validation",
                g.name()
            )));
        }
    }
    Ok((g, r))
}

fn group_validate(src: &GroupSource) -> CliResult<Output> {
    let (g, r) = load_raw(src)?;
    let axioms = validate_group(&g);
    // irreps of a non-group are meaningless, so only check them on a group
    let irreps = if axioms.is_valid() {
        Some(validate_irreps(&g, &r, &Tolerances::default())?)
    } else {
        None
    };
    let pass = axioms.is_valid() && irreps.as_ref().is_some_and(|i| i.pass());
    let json = json!({
        "group": g.name(),
        "order": g.order(),
        "axioms": value(&axioms)?,
        "irreps": value(&irreps)?,
        "pass": pass,
    });
    Ok(json_only(json, pass))
}

fn group_info(src: &GroupSource) -> CliResult<Output> {
    let (g, r) = load(src)?;
    let mut table = Table::new(&["label", "dim", "character"]);
    let irreps: Vec<Value> = r
        .irreps()
        .iter()
        .map(|i| {
            let chi = i.character();
            table.push(vec![
                i.label.clone(),
                i.dim.to_string(),
                chi.iter()
                    .map(|c| format!("{}{}{}i", num(c.re), if c.im < 0.0 { "" } else { "+" }, num(c.im)))
                    .collect::<Vec<_>>()
                    .join(" "),
            ]);
            json!({"label": i.label, "dim": i.dim, "character": to_pairs(&chi)})
        })
        .collect();
    let json = json!({
        "group": g.name(),
        "order": g.order(),
        "identity": g.identity(),
        "abelian": g.is_abelian(),
        "dim_square_sum": r.dim_square_sum(),
        "complete": r.is_complete(),
        "irreps": irreps,
    });
    Ok(with_table(json, table, true))
}

fn element(path: Option<&Path>, g: &Arc<GroupTable>, seed: u64) -> CliResult<AlgElement> {
    match path {
        Some(p) => Ok(AlgElement::from_json(&read_json::<AlgElementJson>(p)?, g)?),
        None => Ok(AlgElement::random(g, &mut oapoly::rng::seeded(seed))),
    }
}

fn fourier_transform(cli: &Cli, src: &GroupSource, input: Option<&Path>) -> CliResult<Output> {
    let (g, r) = load(src)?;
    let f = element(input, &g, cli.seed)?;
    let side = fourier(&f, &r)?;
    let back = inverse_fourier(&side, &r)?;
    let residual = (&back - &f).max_abs();
    let tol = cli.tol.unwrap_or(LINEAR_TOL);
    let pass = residual <= tol;
    let json = json!({
        "element": value(&f.to_json())?,
        "fourier": value(&side.to_json(&r))?,
        "round_trip_residual": residual,
        "tol": tol,
        "pass": pass,
    });
    Ok(json_only(json, pass))
}

enum Domain {
    Group(IrrepRegistry),
    Matrix(usize),
    Trig(usize),
}

fn model_poly(model: Model, n: usize, r: &IrrepRegistry) -> CliResult<HomPoly> {
    Ok(match model {
        Model::TracePower => block_power_trace(r, n, vec![Complex64::new(1.0, 0.0); r.len()])?,
        Model::BlockTracePower => block_trace_then_power(r, n)?,
        Model::TotalTracePower => total_trace_then_power(r.group(), n)?,
    })
}

/// The polynomial and the domain it lives on. A group named in the
/// polynomial file resolves to the builtin of that name unless a group
/// source is given.
fn load_poly(src: &GroupSource, ps: &PolySource) -> CliResult<(HomPoly, Domain)> {
    let have_group = src.group.is_some() || src.group_file.is_some();
    match (&ps.poly, ps.model) {
        (None, Some(model)) => {
            let (_, r) = load(src)?;
            let p = model_poly(model, ps.n, &r)?;
            Ok((p, Domain::Group(r)))
        }
        (Some(path), None) => {
            let file: PolynomialFile = read_json(path)?;
            match file.domain.clone() {
                DomainDescriptor::Group { name, .. } => {
                    let (g, r) = if have_group {
                        load(src)?
                    } else {
                        builtin_by_name(&name)?
                    };
                    let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(g));
                    Ok((file.into_poly(alg)?, Domain::Group(r)))
                }
                DomainDescriptor::Matrix { k } => {
                    let alg: SharedAlgebra = Arc::new(MatrixAlgebra::new(k));
                    Ok((file.into_poly(alg)?, Domain::Matrix(k)))
                }
                DomainDescriptor::Trig { cap } => {
                    let alg: SharedAlgebra = Arc::new(TrigAlgebra::new(cap));
                    Ok((file.into_poly(alg)?, Domain::Trig(cap)))
                }
            }
        }
        _ => Err(CliError::usage("give exactly one of --poly and --model")),
    }
}

fn oadd_check(cli: &Cli, src: &GroupSource, ps: &PolySource, count: usize, suite: SuiteArg) -> CliResult<Output> {
    let (p, domain) = load_poly(src, ps)?;
    let suite = match suite {
        SuiteArg::Full => PairSuite::Full,
        SuiteArg::CrossIdeal => PairSuite::CrossIdeal,
    };
    let pairs = match &domain {
        Domain::Group(r) => orthogonal_pairs(PairDomain::Group(r), count, cli.seed, suite)?,
        Domain::Matrix(k) => orthogonal_pairs(PairDomain::Matrix(*k), count, cli.seed, suite)?,
        Domain::Trig(cap) => cross_frequency_pairs(*cap, count, cli.seed),
    };
    let tol = cli.tol.unwrap_or(1e-9);
    let outcome = check_orthogonal_additivity(&p, &pairs, tol)?;
    let pass = outcome.passed();
    let json = json!({
        "domain": value(&p.domain())?,
        "degree": p.degree(),
        "suite": value(&suite)?,
        "pairs": pairs.len(),
        "tol": tol,
        "result": value(&outcome)?,
        "pass": pass,
    });
    Ok(json_only(json, pass))
}

fn group_registry(domain: Domain) -> CliResult<IrrepRegistry> {
    match domain {
        Domain::Group(r) => Ok(r),
        _ => Err(CliError::usage("this command needs a polynomial over a group algebra")),
    }
}

fn represent_extract(cli: &Cli, src: &GroupSource, ps: &PolySource, pairs: usize) -> CliResult<Output> {
    let (p, domain) = load_poly(src, ps)?;
    let r = group_registry(domain)?;
    let mut opts = ExtractOptions::new(cli.seed);
    opts.pairs = pairs;
    if let Some(tol) = cli.tol {
        opts.verify_tol = tol;
    }
    let (phi, report) = extract(&p, &r, &opts)?;
    let json = json!({
        "phi": value(&phi.to_file())?,
        "report": value(&report)?,
        "pass": report.pass,
    });
    Ok(json_only(json, report.pass))
}

fn represent_verify(cli: &Cli, src: &GroupSource, ps: &PolySource, phi: &Path, samples: usize) -> CliResult<Output> {
    let (p, _) = load_poly(src, ps)?;
    let phi = read_json::<LinearMapFile>(phi)?.into_map()?;
    let report = verify_representation(&p, &phi, samples, cli.seed, cli.tol.unwrap_or(DEFAULT_VERIFY_TOL))?;
    Ok(json_only(value(&report)?, report.pass))
}

fn represent_span(cli: &Cli, src: &GroupSource, n: usize) -> CliResult<Output> {
    let (g, _) = load(src)?;
    let report = span_check(&g, n, cli.seed)?;
    let mut table = Table::new(&["group", "order", "n", "samples", "rank", "condition_ratio", "pass"]);
    table.push(vec![
        report.group.clone(),
        report.order.to_string(),
        report.degree.to_string(),
        report.samples.to_string(),
        report.rank.to_string(),
        num(report.condition_ratio),
        report.pass.to_string(),
    ]);
    Ok(with_table(value(&report)?, table, report.pass))
}

#[allow(clippy::too_many_arguments)]
fn norms_certify(
    cli: &Cli,
    src: &GroupSource,
    input: Option<&Path>,
    verify: Option<&Path>,
    n: usize,
    kind: CertKind,
    norm: &str,
    refine: usize,
) -> CliResult<Output> {
    let (g, r) = load(src)?;
    let tol = cli.tol.unwrap_or(RECONSTRUCTION_TOL);
    if let Some(path) = verify {
        let cert = read_json::<CertificateFile>(path)?.into_certificate(&g)?;
        let check = verify_certificate(&cert, Some(&r), tol)?;
        return Ok(json_only(
            json!({ "check": value(&check)?, "pass": check.pass }),
            check.pass,
        ));
    }
    let a = element(input, &g, cli.seed)?;
    let ctx = NormContext::new(BanachNorm::parse(norm)?, Some(&r));
    let bound = match kind {
        CertKind::Sn => sn_bound(&a, n, &ctx)?,
        CertKind::Pn => pn_bound(
            &a,
            n,
            &ctx,
            &PnOptions {
                refine_steps: refine,
                seed: cli.seed,
            },
        )?,
    };
    let check = verify_certificate(&bound.certificate, Some(&r), tol)?;
    let pass = check.pass && bound.lower <= bound.upper * (1.0 + 1e-12) + 1e-12;
    let json = json!({
        "lower": bound.lower,
        "upper": bound.upper,
        "route": value(&bound.route)?,
        "certificate": value(&bound.certificate.to_file())?,
        "check": value(&check)?,
        "pass": pass,
    });
    Ok(json_only(json, pass))
}

fn norms_chain(cli: &Cli, src: &GroupSource, n: usize, count: usize) -> CliResult<Output> {
    let (g, r) = load(src)?;
    let ctx = NormContext::new(BanachNorm::L1, Some(&r));
    let mut rng = oapoly::rng::seeded(cli.seed);
    let mut table = Table::new(&["index", "lower", "sn_upper", "pn_upper", "slack_bound", "route", "pass"]);
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let a = AlgElement::random(&g, &mut rng);
        let rep = chain_check(&a, n, &ctx, &PnOptions::default())?;
        table.push(vec![
            i.to_string(),
            num(rep.lower),
            num(rep.sn_upper),
            num(rep.pn_upper),
            num(rep.slack_bound),
            value(&rep.pn_route)?.as_str().unwrap_or_default().to_string(),
            rep.pass.to_string(),
        ]);
        rows.push(rep);
    }
    let pass = rows.iter().all(|r| r.pass);
    let json = json!({ "group": g.name(), "degree": n, "rows": value(&rows)?, "pass": pass });
    Ok(with_table(json, table, pass))
}

fn circle_fejer(cli: &Cli, ms: &[usize], k: i64, n: usize) -> CliResult<Output> {
    let tol = cli.tol.unwrap_or(1e-8);
    let cap = k.unsigned_abs() as usize;
    let chi = TrigPoly::chi(k, cap)?;
    let limit = fejer_limit_check(&chi, &chi, n, ms)?;
    let mut table = Table::new(&["m", "l1_norm", "value_re", "value_im", "error", "closed_form_residual"]);
    let mut kernels = Vec::with_capacity(ms.len());
    let mut pass = limit.pass;
    for (row, &m) in limit.rows.iter().zip(ms) {
        let mass = lp_norm_t(&fejer(m), 1.0, Grid::diagnostic(m))?;
        pass &= (mass - 1.0).abs() <= tol;
        table.push(vec![
            m.to_string(),
            num(mass),
            num(row.value.re),
            num(row.value.im),
            num(row.error),
            num(row.closed_form_residual),
        ]);
        kernels.push(json!({ "m": m, "l1_norm": mass }));
    }
    let json = json!({
        "k": k,
        "kernels": kernels,
        "limit": value(&limit)?,
        "tol": tol,
        "pass": pass,
    });
    Ok(with_table(json, table, pass))
}

fn circle_diagnose(
    example: Example,
    p: Option<f64>,
    q: Option<f64>,
    m: Option<&[usize]>,
    n_list: Option<&[usize]>,
    control: bool,
) -> CliResult<Output> {
    match example {
        Example::Ca11 => {
            if q.is_some() || n_list.is_some() {
                return Err(CliError::usage("example 4.1 takes --p, --m and --control"));
            }
            let h = if control { HCoeffs::Control } else { HCoeffs::PowerLaw };
            let rep = diagnostic_ca11(p.unwrap_or(1.5), &h, m.unwrap_or(&[10, 100, 1000]))?;
            let mut table = Table::new(&["m", "norm", "harmonic_sum", "companion", "attained"]);
            for r in &rep.rows {
                table.push(vec![
                    r.m.to_string(),
                    num(r.norm),
                    num(r.harmonic_sum),
                    num(r.companion),
                    num(r.attained),
                ]);
            }
            Ok(with_table(value(&rep)?, table, rep.pass))
        }
        Example::Ca12 => {
            if m.is_some() || control {
                return Err(CliError::usage("example 4.2 takes --p or --q, and --n"));
            }
            let p = match (p, q) {
                (Some(p), None) => p,
                (None, Some(q)) if q > 1.0 => q / (q - 1.0),
                (None, Some(q)) => return Err(oapoly::Error::BadExponent(q).into()),
                _ => 2.0,
            };
            let rep = diagnostic_ca12(p, n_list.unwrap_or(&[16, 64, 256]))?;
            let mut table = Table::new(&["n", "norm", "norm_4n", "ratio", "threshold", "pass"]);
            for r in &rep.rows {
                table.push(vec![
                    r.n.to_string(),
                    num(r.norm),
                    num(r.norm_4n),
                    num(r.ratio),
                    num(r.threshold),
                    r.pass.to_string(),
                ]);
            }
            Ok(with_table(value(&rep)?, table, rep.pass))
        }
        Example::Linf => {
            if p.is_some() || q.is_some() || m.is_some() || control {
                return Err(CliError::usage("example 4.3 takes --n only"));
            }
            let rep = diagnostic_linf(n_list.unwrap_or(&[0, 1, 64, 256, 1024]))?;
            let mut table = Table::new(&["n", "norm", "threshold", "pass"]);
            for r in &rep.rows {
                table.push(vec![r.n.to_string(), num(r.norm), num(r.threshold), r.pass.to_string()]);
            }
            Ok(with_table(value(&rep)?, table, rep.pass))
        }
    }
}

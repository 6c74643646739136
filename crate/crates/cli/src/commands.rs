use num_rational::Rational64;
use singular_moduli::algexpr::{closed_form_registry, eval_expr, relative_difference};
use singular_moduli::elliptic::{alpha_from_nome, singular_alpha};
use singular_moduli::explicit::check_closed_form;
use singular_moduli::invariants::{class_invariant, g_numeric, registry_lookup, registry_slots, InvariantKind};
use singular_moduli::modeq::{
    canonical_grid, identity_ids, parse_fixtures, run_fixture, verify_identity, verify_suite,
    THRESHOLD_LOSS,
};
use singular_moduli::numerics::nome_from_n;
use singular_moduli::qseries::{chi, f_neg, f_pos, phi, psi};
use singular_moduli::singular_cf::{
    alpha_9n, alpha_n_over_9, s1_cf, s1_product, s1_singular, s2_cf, s2_product,
};
use singular_moduli::{BigReal, Error, NomeSpec, PrecisionContext, Result};

use crate::report::Report;
use crate::{CfFn, CfRoute, Kind, TableSet, ThetaFn};

fn threshold(ctx: &PrecisionContext) -> BigReal {
    ctx.tolerance(THRESHOLD_LOSS)
}

fn note_rational(report: &mut Report, n: Rational64) {
    if !n.is_integer() {
        report.notes.push(format!("n = {n} is not an integer"));
    }
}

pub fn theta(f: ThetaFn, q: &NomeSpec, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("theta", ctx.decimal_digits());
    report.input("fn", f.name()).input("q", q);
    let nome = q.to_nome(ctx)?;
    let value = match f {
        ThetaFn::Phi => phi(&nome, ctx),
        ThetaFn::Psi => psi(&nome, ctx),
        ThetaFn::Fneg => f_neg(&nome, ctx),
        ThetaFn::Chi => chi(&nome, ctx),
        ThetaFn::Fpos => f_pos(&nome, ctx),
    };
    report.value(format!("{}(q)", f.name()), &value);
    Ok(report)
}

pub fn alpha(n: Option<Rational64>, q: Option<&NomeSpec>, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("alpha", ctx.decimal_digits());
    let m = match (n, q) {
        (Some(n), _) => {
            report.input("n", n);
            note_rational(&mut report, n);
            singular_alpha(n, ctx)?
        }
        (None, Some(q)) => {
            report.input("q", q);
            alpha_from_nome(&q.to_nome(ctx)?, ctx)?
        }
        (None, None) => unreachable!("clap requires one of --n, --q"),
    };
    report.value("alpha", m.alpha());
    report.value("1-alpha", m.complement());
    let ratio = m.period_ratio(ctx);
    match n {
        Some(n) => {
            let residual = (&ratio - BigReal::from_ratio(&n, ctx).sqrt()).abs();
            report.checked("K'/K", &ratio, &residual, &threshold(ctx));
        }
        None => report.value("K'/K", &ratio),
    }
    Ok(report)
}

pub fn invariant(kind: Kind, n: Rational64, ctx: &PrecisionContext) -> Result<Report> {
    let kind = kind.into();
    let mut report = Report::new("invariant", ctx.decimal_digits());
    report.input("kind", kind).input("n", n);
    note_rational(&mut report, n);
    invariant_rows(&mut report, kind, n, ctx)?;
    Ok(report)
}

/// The invariant with its modulus residual, plus its closed form if registered.
fn invariant_rows(report: &mut Report, kind: InvariantKind, n: Rational64, ctx: &PrecisionContext) -> Result<()> {
    let inv = class_invariant(kind, n, ctx)?;
    let label = format!("{kind}_{n}");
    report.checked(&label, &inv.value, &inv.modulus_residual(ctx)?, &threshold(ctx));
    if let Some(expr) = registry_lookup(kind, n) {
        let exact = eval_expr(&expr, ctx)?;
        let residual = relative_difference(&exact, &inv.value);
        report.checked(format!("{label} := {expr}"), &exact, &residual, &threshold(ctx));
    }
    Ok(())
}

pub fn cf(f: CfFn, q: &NomeSpec, terms: usize, route: CfRoute, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("cf", ctx.decimal_digits());
    report
        .input("fn", f.name())
        .input("q", q)
        .input("route", route.name())
        .input("terms", terms);
    let nome = q.to_nome(ctx)?;
    let product = match f {
        CfFn::S1 => s1_product(&nome, ctx),
        CfFn::S2 => s2_product(&nome, ctx),
    };
    match route {
        CfRoute::Product => report.value(format!("{} (product)", f.name()), &product),
        CfRoute::Cf => {
            let state = match f {
                CfFn::S1 => s1_cf(&nome, terms, ctx)?,
                CfFn::S2 => s2_cf(&nome, terms, ctx)?,
            };
            let residual = (&state.convergent - &product).abs();
            let label = format!("{} (continued fraction, {} terms)", f.name(), state.terms_used);
            report.checked(label, &state.convergent, &residual, &threshold(ctx));
        }
    }
    Ok(report)
}

pub fn singular(n: Rational64, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("singular", ctx.decimal_digits());
    report.input("n", n);
    note_rational(&mut report, n);
    let tol = threshold(ctx);
    let nine = Rational64::from_integer(9);

    report.value(format!("alpha_{n}"), singular_alpha(n, ctx)?.alpha());
    let g = g_numeric(n, ctx)?;
    for (m, from_g) in [(n * nine, alpha_9n(&g.value, ctx)?), (n / nine, alpha_n_over_9(&g.value, ctx)?)] {
        let direct = singular_alpha(m, ctx)?;
        let residual = relative_difference(&from_g, direct.alpha());
        report.checked(format!("alpha_{m} (from g_{n})"), &from_g, &residual, &tol);
    }
    invariant_rows(&mut report, InvariantKind::SmallG, n, ctx)?;
    invariant_rows(&mut report, InvariantKind::BigG, n, ctx)?;

    let q = nome_from_n(n, ctx)?;
    let s1 = s1_product(&q, ctx);
    let residual = relative_difference(&s1_singular(n, ctx)?, &s1);
    report.checked("S1 (alpha^(1/8)/sqrt(2) vs product)", &s1, &residual, &tol);
    report.value("S2 (product)", &s2_product(&q, ctx));
    Ok(report)
}

pub enum VerifyScope {
    All,
    Identity(String, Option<NomeSpec>),
    Fixtures(String),
}

pub fn verify(scope: &VerifyScope, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("verify", ctx.decimal_digits());
    match scope {
        VerifyScope::All => {
            report.input("scope", "all");
            let grid = canonical_grid(ctx);
            let suite = verify_suite(&identity_ids(), &grid, ctx)?;
            for case in &suite.cases {
                let label = format!("{} @ q={}", case.id, case.q.to_decimal_string(6));
                match &case.outcome {
                    Ok(r) => report.checked(label, &r.lhs, &r.residual, &r.threshold),
                    Err(e) => report.failed(label, e),
                }
            }
            closed_form_rows(&mut report, &all_labels(), ctx);
        }
        VerifyScope::Identity(id, q) => {
            report.input("identity", id);
            let grid = match q {
                Some(q) => {
                    report.input("q", q);
                    vec![q.to_nome(ctx)?]
                }
                None => canonical_grid(ctx),
            };
            for nome in &grid {
                let r = verify_identity(id, nome, ctx)?;
                let label = format!("{} @ q={}", r.id, r.q.to_decimal_string(6));
                report.checked(label, &r.lhs, &r.residual, &r.threshold);
            }
        }
        VerifyScope::Fixtures(path) => {
            report.input("fixtures", path);
            let text = std::fs::read_to_string(path).map_err(|e| Error::Fixture {
                line: 0,
                message: format!("cannot read {path}: {e}"),
            })?;
            for case in parse_fixtures(&text)? {
                let label = format!("line {}: {} @ q={} ({} digits)", case.line, case.id, case.q, case.digits);
                match run_fixture(&case) {
                    Ok(r) => report.checked(label, &r.lhs, &r.residual, &r.threshold),
                    Err(e) => report.failed(label, &e),
                }
            }
        }
    }
    Ok(report)
}

fn all_labels() -> Vec<&'static str> {
    closed_form_registry().labels().collect()
}

/// Two rows per label: the closed form, then the direct value with the residual.
fn closed_form_rows(report: &mut Report, labels: &[&str], ctx: &PrecisionContext) {
    let tol = threshold(ctx);
    for label in labels {
        match check_closed_form(label, ctx) {
            Ok(check) => {
                report.value(format!("{label} (closed form)"), &check.closed);
                report.checked(format!("{label} (direct: {})", check.target), &check.direct, &check.residual, &tol);
            }
            Err(e) => report.failed(*label, &e),
        }
    }
}

pub fn closed_forms(label: Option<&str>, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("closed-forms", ctx.decimal_digits());
    let labels = match label {
        Some(l) => {
            report.input("label", l);
            // surface unknown labels as usage errors rather than failed rows
            closed_form_registry().get(l)?;
            vec![closed_form_registry().labels().find(|k| *k == l).expect("checked above")]
        }
        None => {
            report.input("scope", "all");
            all_labels()
        }
    };
    for l in &labels {
        let expr = closed_form_registry().get(l)?;
        report.notes.push(format!("{l} := {expr}"));
    }
    closed_form_rows(&mut report, &labels, ctx);
    Ok(report)
}

/// Closed forms for singular moduli, continued fractions and the radicals
/// used to simplify them.
const CLOSED_FORM_TABLE_PREFIXES: &[&str] = &["alpha_", "S1_", "S2_", "g8_root", "nested_", "denested_", "three_", "sqrt2_"];

pub fn table(set: TableSet, ctx: &PrecisionContext) -> Result<Report> {
    let mut report = Report::new("table", ctx.decimal_digits());
    report.input("set", set.name());
    match set {
        TableSet::Section5 => {
            let labels: Vec<&str> = closed_form_registry()
                .labels()
                .filter(|l| CLOSED_FORM_TABLE_PREFIXES.iter().any(|p| l.starts_with(p)))
                .collect();
            closed_form_rows(&mut report, &labels, ctx);
        }
        TableSet::Invariants => {
            for (kind, n, _) in registry_slots() {
                if let Err(e) = invariant_rows(&mut report, kind, n, ctx) {
                    report.failed(format!("{kind}_{n}"), &e);
                }
            }
        }
    }
    Ok(report)
}

/// Inputs that were fine syntactically but describe no valid computation
/// count as usage errors; everything else is a verification failure.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(
        e,
        Error::PrecisionTooLow { .. }
            | Error::NonPositive { .. }
            | Error::NomeOutOfRange { .. }
            | Error::Domain { .. }
            | Error::UnknownIdentity(_)
            | Error::UnknownLabel(_)
            | Error::Syntax { .. }
            | Error::Fixture { .. }
            | Error::EmptySuite(_)
    )
}

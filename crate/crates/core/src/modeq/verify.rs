use rayon::prelude::*;

use super::registry::{lookup, Sides};
use crate::error::{Error, Result};
use crate::numerics::{BigReal, PrecisionContext};
use crate::qseries::Nome;

/// Default pass threshold is `10^-(decimal_digits - THRESHOLD_LOSS)`.
pub const THRESHOLD_LOSS: u32 = 10;

/// Outcome of checking one identity at one nome.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub id: String,
    pub q: BigReal,
    pub decimal_digits: u32,
    /// Left-hand side of the identity as registered.
    pub lhs: BigReal,
    pub residual: BigReal,
    pub threshold: BigReal,
    pub pass: bool,
}

/// `|lhs - rhs| / max(|lhs|, |rhs|, 1)`.
pub fn relative_residual(s: &Sides) -> BigReal {
    let one = BigReal::from_bigint(&1.into(), s.lhs.precision_bits());
    let scale = s.lhs.abs().max(&s.rhs.abs()).max(&one);
    (&s.lhs - &s.rhs).abs() / scale
}

/// Checks `id` at `q` against the default threshold.
pub fn verify_identity(id: &str, q: &Nome, ctx: &PrecisionContext) -> Result<ResidualReport> {
    verify_identity_with(id, q, ctx, ctx.tolerance(THRESHOLD_LOSS))
}

/// Checks `id` at `q` against an explicit threshold.
pub fn verify_identity_with(
    id: &str,
    q: &Nome,
    ctx: &PrecisionContext,
    threshold: BigReal,
) -> Result<ResidualReport> {
    let identity = lookup(id)?;
    let sides = identity.sides(q, ctx)?;
    let residual = relative_residual(&sides);
    Ok(ResidualReport {
        id: identity.id.to_string(),
        q: q.q().clone(),
        decimal_digits: ctx.decimal_digits(),
        lhs: sides.lhs,
        pass: residual < threshold,
        residual,
        threshold,
    })
}

/// One `(identity, nome)` case of a suite.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub id: String,
    pub q: BigReal,
    pub outcome: Result<ResidualReport>,
}

/// All cases of a suite in input order (identities outer, nomes inner).
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub cases: Vec<SuiteCase>,
}

impl SuiteReport {
    /// True when every case evaluated and passed.
    pub fn all_pass(&self) -> bool {
        self.cases
            .iter()
            .all(|c| matches!(&c.outcome, Ok(r) if r.pass))
    }

    /// Largest residual among the cases that evaluated.
    pub fn max_residual(&self) -> Option<BigReal> {
        self.cases
            .iter()
            .filter_map(|c| c.outcome.as_ref().ok())
            .map(|r| r.residual.clone())
            .reduce(|a, b| a.max(&b))
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteCase> {
        self.cases
            .iter()
            .filter(|c| !matches!(&c.outcome, Ok(r) if r.pass))
    }
}

/// Runs every `(id, q)` combination concurrently. A failing case is recorded
/// and the rest continue; only empty input is an error.
pub fn verify_suite(ids: &[&str], grid: &[Nome], ctx: &PrecisionContext) -> Result<SuiteReport> {
    if ids.is_empty() {
        return Err(Error::EmptySuite("no identities"));
    }
    if grid.is_empty() {
        return Err(Error::EmptySuite("no nomes"));
    }
    let jobs: Vec<(&str, &Nome)> = ids
        .iter()
        .flat_map(|id| grid.iter().map(move |q| (*id, q)))
        .collect();
    let cases = jobs
        .par_iter()
        .map(|&(id, q)| SuiteCase {
            id: id.to_string(),
            q: q.q().clone(),
            outcome: verify_identity(id, q, ctx),
        })
        .collect();
    Ok(SuiteReport { cases })
}

/// The standard grid `q ∈ {0.05, 0.1, 0.2, 0.3, 0.4}`.
pub fn canonical_grid(ctx: &PrecisionContext) -> Vec<Nome> {
    ["0.05", "0.1", "0.2", "0.3", "0.4"]
        .iter()
        .map(|s| Nome::from_decimal(s, ctx).expect("grid nomes are valid"))
        .collect()
}

//! Pairs every registered closed form with an independent direct evaluation.

use std::fmt;

use num_rational::Rational64;

use crate::algexpr::{closed_form_registry, eval_expr, relative_difference};
use crate::elliptic::singular_alpha;
use crate::error::{Error, Result};
use crate::invariants::{g_numeric, G_numeric, InvariantKind};
use crate::numerics::{nome_from_n, BigReal, PrecisionContext};
use crate::singular_cf::{s1_product, s2_product};

/// What a closed form is claimed to equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `α_n` from the nome `e^{-π√n}`.
    Alpha(Rational64),
    /// `S₁(e^{-π√n})` from its product form.
    S1(Rational64),
    /// `S₂(e^{-π√n})` from its product form.
    S2(Rational64),
    /// A class invariant from its theta quotients.
    Invariant(InvariantKind, Rational64),
    /// Another registered closed form.
    Label(&'static str),
    /// `√(g₈²⁴+1)`, `√(g₈⁸+1)` or `√(g₈¹⁶-g₈⁸+1)` (tagged 24, 8, 16) with
    /// numeric `g₈`.
    G8Radical(u8),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Alpha(n) => write!(f, "alpha(exp(-pi*sqrt({n})))"),
            Target::S1(n) => write!(f, "S1 product at exp(-pi*sqrt({n}))"),
            Target::S2(n) => write!(f, "S2 product at exp(-pi*sqrt({n}))"),
            Target::Invariant(k, n) => write!(f, "{k}_{n} from theta quotients"),
            Target::Label(l) => write!(f, "closed form `{l}`"),
            Target::G8Radical(24) => f.write_str("sqrt(g_8^24+1), numeric g_8"),
            Target::G8Radical(8) => f.write_str("sqrt(g_8^8+1), numeric g_8"),
            Target::G8Radical(_) => f.write_str("sqrt(g_8^16-g_8^8+1), numeric g_8"),
        }
    }
}

fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

/// The target of each registered label.
pub fn target_of(label: &str) -> Result<Target> {
    use InvariantKind::{BigG, SmallG};
    Ok(match label {
        "alpha_36" | "alpha_36_unreduced" => Target::Alpha(r(36, 1)),
        "alpha_4_9" | "alpha_4_9_unreduced" => Target::Alpha(r(4, 9)),
        "alpha_72" | "alpha_72_unreduced" => Target::Alpha(r(72, 1)),
        "alpha_8_9" | "alpha_8_9_unreduced" => Target::Alpha(r(8, 9)),
        "S1_36" => Target::S1(r(36, 1)),
        "S1_4_9" => Target::S1(r(4, 9)),
        "S1_72" => Target::S1(r(72, 1)),
        "S1_8_9" => Target::S1(r(8, 9)),
        "S2_3sqrt5" => Target::S2(r(45, 1)),
        "S2_sqrt5_3" => Target::S2(r(5, 9)),
        "S2_3sqrt7" => Target::S2(r(63, 1)),
        "S2_sqrt7_3" => Target::S2(r(7, 9)),
        "G_1" => Target::Invariant(BigG, r(1, 1)),
        "g_1" => Target::Invariant(SmallG, r(1, 1)),
        "g_4" => Target::Invariant(SmallG, r(4, 1)),
        "g_8" => Target::Invariant(SmallG, r(8, 1)),
        "three_minus_2sqrt2" => Target::Label("sqrt2_minus_1_sq"),
        "sqrt2_minus_1_sq" => Target::Label("three_minus_2sqrt2"),
        "nested_5_4sqrt2" => Target::Label("denested_5_4sqrt2"),
        "denested_5_4sqrt2" => Target::Label("nested_5_4sqrt2"),
        "nested_1_sqrt2" => Target::Label("denested_1_sqrt2"),
        "denested_1_sqrt2" => Target::Label("nested_1_sqrt2"),
        "g8_root24" => Target::G8Radical(24),
        "g8_root8" => Target::G8Radical(8),
        "g8_root16" => Target::G8Radical(16),
        other => return Err(Error::UnknownLabel(other.to_string())),
    })
}

/// Evaluates a target without using any closed form (except for
/// [`Target::Label`], which compares two closed forms).
pub fn direct_value(target: Target, ctx: &PrecisionContext) -> Result<BigReal> {
    match target {
        Target::Alpha(n) => Ok(singular_alpha(n, ctx)?.alpha().clone()),
        Target::S1(n) => Ok(s1_product(&nome_from_n(n, ctx)?, ctx)),
        Target::S2(n) => Ok(s2_product(&nome_from_n(n, ctx)?, ctx)),
        Target::Invariant(InvariantKind::BigG, n) => Ok(G_numeric(n, ctx)?.value),
        Target::Invariant(InvariantKind::SmallG, n) => Ok(g_numeric(n, ctx)?.value),
        Target::Label(label) => eval_expr(closed_form_registry().get(label)?, ctx),
        Target::G8Radical(which) => {
            let g8 = g_numeric(r(8, 1), ctx)?.value.powi(8);
            let one = BigReal::one(ctx);
            let radicand = match which {
                24 => g8.powi(3) + one,
                8 => g8 + one,
                _ => g8.powi(2) - &g8 + one,
            };
            Ok(radicand.sqrt())
        }
    }
}

/// A closed form next to its direct evaluation.
#[derive(Debug, Clone)]
pub struct ClosedFormCheck {
    pub label: String,
    pub target: Target,
    pub closed: BigReal,
    pub direct: BigReal,
    /// `|closed - direct| / max(|closed|, |direct|)`.
    pub residual: BigReal,
}

/// Evaluates closed form `label` and its target at the precision of `ctx`.
pub fn check_closed_form(label: &str, ctx: &PrecisionContext) -> Result<ClosedFormCheck> {
    let expr = closed_form_registry().get(label)?;
    let target = target_of(label)?;
    let closed = eval_expr(expr, ctx)?;
    let direct = direct_value(target, ctx)?;
    Ok(ClosedFormCheck {
        label: label.to_string(),
        target,
        residual: relative_difference(&closed, &direct),
        closed,
        direct,
    })
}

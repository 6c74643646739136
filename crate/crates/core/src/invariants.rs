//! Weber–Ramanujan class invariants
//!
//! `G_n = 2^{-1/4} q^{-1/24} χ(q)` and `g_n = 2^{-1/4} q^{-1/24} χ(-q)` at
//! `q = e^{-π√n}`. Each is computed twice, from the `χ` product and from the
//! eta quotient `f(±q) / (2^{1/4} q^{1/24} f(-q²))`, and the two must agree.

use std::fmt;

use num_rational::Rational64;

use crate::algexpr::{closed_form_registry, Expr};
use crate::elliptic::{singular_alpha, Modulus};
use crate::error::{Error, Result};
use crate::numerics::{nome_from_n, BigReal, PrecisionContext};
use crate::qseries::{chi, chi_at_neg, f_general, f_neg, Nome};

const ROUTE_SLACK_DIGITS: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvariantKind {
    /// `G_n`, built from `χ(q)`.
    BigG,
    /// `g_n`, built from `χ(-q)`.
    SmallG,
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantKind::BigG => "G",
            InvariantKind::SmallG => "g",
        })
    }
}

/// A computed class invariant with its registered closed form, if any.
#[derive(Debug, Clone)]
pub struct ClassInvariant {
    pub kind: InvariantKind,
    pub n: Rational64,
    pub value: BigReal,
    pub closed_form: Option<Expr>,
}

impl ClassInvariant {
    /// Whether `n` is an integer; rational `n` is accepted but worth flagging.
    pub fn integral_n(&self) -> bool {
        self.n.is_integer()
    }

    /// Relative residual of `value^{-24} = 4α(1-α)` (for `G`) or
    /// `value^{-24} = 4α(1-α)^{-2}` (for `g`), with `α = α_n` from the nome.
    pub fn modulus_residual(&self, ctx: &PrecisionContext) -> Result<BigReal> {
        let m = singular_alpha(self.n, ctx)?;
        let four_alpha = BigReal::from_u64(4, ctx) * m.alpha();
        let expected = match self.kind {
            InvariantKind::BigG => four_alpha * m.complement(),
            InvariantKind::SmallG => four_alpha / m.complement().powi(2),
        };
        let actual = self.value.powi(-24);
        Ok((&actual - &expected).abs() / expected)
    }
}

/// `2^{-1/4} q^{-1/24} χ(±q)` and `f(±q) / (2^{1/4} q^{1/24} f(-q²))`.
fn both_routes(kind: InvariantKind, q: &Nome, ctx: &PrecisionContext) -> (BigReal, BigReal) {
    let qv = q.q().with_context(ctx);
    let prefactor = BigReal::from_u64(2, ctx).pow_rational_unchecked(Rational64::new(-1, 4))
        * qv.pow_rational_unchecked(Rational64::new(-1, 24));
    let (chi_value, f_value) = match kind {
        InvariantKind::BigG => (
            chi(q, ctx),
            // f(q) = f(q, -q²)
            f_general(&qv, &-qv.powi(2), ctx).expect("|q³| < 1"),
        ),
        InvariantKind::SmallG => (chi_at_neg(q, ctx), f_neg(q, ctx)),
    };
    let via_chi = &prefactor * chi_value;
    let via_eta = prefactor * f_value / f_neg(&q.pow(2), ctx);
    (via_chi, via_eta)
}

/// The invariant of the given kind at an arbitrary nome, both routes checked.
pub fn invariant_at(kind: InvariantKind, q: &Nome, ctx: &PrecisionContext) -> Result<BigReal> {
    let (via_chi, via_eta) = both_routes(kind, q, ctx);
    let gap = (&via_chi - &via_eta).abs() / &via_eta;
    // negated so that a NaN gap is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(gap < ctx.tolerance(ROUTE_SLACK_DIGITS)) {
        return Err(Error::InternalInconsistency {
            what: "class invariant",
            residual: gap.to_decimal_string(6),
        });
    }
    Ok(via_eta)
}

/// The invariant of either kind at `q = e^{-π√n}`.
pub fn class_invariant(kind: InvariantKind, n: Rational64, ctx: &PrecisionContext) -> Result<ClassInvariant> {
    let q = nome_from_n(n, ctx)?;
    Ok(ClassInvariant {
        kind,
        n,
        value: invariant_at(kind, &q, ctx)?,
        closed_form: registry_lookup(kind, n),
    })
}

/// `G_n` for a positive rational `n`.
#[allow(non_snake_case)]
pub fn G_numeric(n: Rational64, ctx: &PrecisionContext) -> Result<ClassInvariant> {
    class_invariant(InvariantKind::BigG, n, ctx)
}

/// `g_n` for a positive rational `n`.
pub fn g_numeric(n: Rational64, ctx: &PrecisionContext) -> Result<ClassInvariant> {
    class_invariant(InvariantKind::SmallG, n, ctx)
}

/// `α_n` from `g_n` through `1/√α - √α = 2g¹²`, taking the root in `(0,1)`:
/// `√α = 1/(√(g²⁴+1) + g¹²)` and `1 - α = 2g¹²√α`.
pub fn alpha_from_g(g: &ClassInvariant, ctx: &PrecisionContext) -> Result<Modulus> {
    if g.kind != InvariantKind::SmallG {
        return Err(Error::Domain {
            what: "alpha_from_g",
            value: format!("{}_{}", g.kind, g.n),
            domain: "invariants of kind g",
        });
    }
    let m = alpha_from_g_value(&g.value, ctx)?;
    Modulus::from_parts(m.alpha().clone(), m.complement().clone(), Some(g.n))
}

/// [`alpha_from_g`] for a bare value `g > 0`.
pub fn alpha_from_g_value(g: &BigReal, ctx: &PrecisionContext) -> Result<Modulus> {
    if !g.is_positive() {
        return Err(Error::NonPositive { what: "alpha_from_g" });
    }
    let g12 = g.with_context(ctx).powi(12);
    let root = (g12.powi(2) + BigReal::one(ctx)).sqrt();
    let sqrt_alpha = (root + &g12).recip();
    let complement = BigReal::from_u64(2, ctx) * g12 * &sqrt_alpha;
    Modulus::from_parts(sqrt_alpha.powi(2), complement, None)
}

/// Registered invariants; `None` marks a slot whose value is only computed.
const REGISTRY: &[(InvariantKind, i64, i64, Option<&str>)] = &[
    (InvariantKind::BigG, 1, 1, Some("G_1")),
    (InvariantKind::SmallG, 1, 1, Some("g_1")),
    (InvariantKind::SmallG, 4, 1, Some("g_4")),
    (InvariantKind::SmallG, 8, 1, Some("g_8")),
    (InvariantKind::BigG, 5, 1, None),
    (InvariantKind::BigG, 7, 1, None),
];

/// Registered `(kind, n)` slots, including value-free ones.
pub fn registry_slots() -> impl Iterator<Item = (InvariantKind, Rational64, Option<&'static str>)> {
    REGISTRY
        .iter()
        .map(|&(k, p, q, label)| (k, Rational64::new(p, q), label))
}

/// The exact closed form of an invariant, if one is registered.
pub fn registry_lookup(kind: InvariantKind, n: Rational64) -> Option<Expr> {
    registry_slots()
        .find(|&(k, m, _)| k == kind && m == n)
        .and_then(|(_, _, label)| label)
        .map(|label| closed_form_registry().get(label).expect("registered label").clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algexpr::eval_expr;
    use crate::numerics::make_context;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn g_one_and_big_g_one() {
        let c = make_context(40).unwrap();
        let big = G_numeric(r(1), &c).unwrap();
        assert!((&big.value - BigReal::one(&c)).abs() < c.tolerance(2));
        let small = g_numeric(r(1), &c).unwrap();
        let expected = BigReal::from_u64(2, &c).pow_rational(Rational64::new(-1, 8)).unwrap();
        assert!((&small.value - expected).abs() < c.tolerance(2));
    }

    #[test]
    fn registered_forms_match_numeric_values() {
        let c = make_context(40).unwrap();
        for (kind, n, label) in registry_slots() {
            let inv = class_invariant(kind, n, &c).unwrap();
            assert!(inv.modulus_residual(&c).unwrap() < c.tolerance(5));
            match label {
                Some(_) => {
                    let exact = eval_expr(inv.closed_form.as_ref().unwrap(), &c).unwrap();
                    assert!((exact - &inv.value).abs() < c.tolerance(3), "{kind}_{n}");
                }
                None => assert!(inv.closed_form.is_none()),
            }
        }
        assert!(registry_lookup(InvariantKind::BigG, r(13)).is_none());
    }

    #[test]
    fn alpha_from_g_closes_the_loop() {
        let c = make_context(40).unwrap();
        for n in [1, 4, 8] {
            let g = g_numeric(r(n), &c).unwrap();
            let via_g = alpha_from_g(&g, &c).unwrap();
            let direct = singular_alpha(r(n), &c).unwrap();
            let gap = (via_g.alpha() - direct.alpha()).abs() / direct.alpha();
            assert!(gap < c.tolerance(5), "n = {n}");
            assert_eq!(via_g.n_label(), Some(r(n)));
        }
        let big = G_numeric(r(1), &c).unwrap();
        assert!(alpha_from_g(&big, &c).is_err());
    }

    #[test]
    fn rational_n_is_flagged() {
        let c = make_context(20).unwrap();
        assert!(!g_numeric(Rational64::new(4, 9), &c).unwrap().integral_n());
        assert!(g_numeric(r(4), &c).unwrap().integral_n());
    }
}

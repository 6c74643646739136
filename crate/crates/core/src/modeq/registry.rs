use num_rational::Rational64;

use super::eta::{EtaFactor, EtaQuotient, ThetaSign};
use crate::elliptic::{alpha_from_nome, Modulus};
use crate::error::{Error, Result};
use crate::invariants::{invariant_at, InvariantKind};
use crate::numerics::{BigReal, PrecisionContext};
use crate::qseries::{f_general, f_neg, phi, Nome};
use crate::singular_cf::alpha_product;

/// Both sides of an identity evaluated at one nome.
#[derive(Debug, Clone)]
pub struct Sides {
    pub lhs: BigReal,
    pub rhs: BigReal,
}

/// A registered identity between theta quotients, moduli and invariants.
#[derive(Clone, Copy)]
pub struct Identity {
    pub id: &'static str,
    /// The relation in words and symbols.
    pub statement: &'static str,
    /// How each symbol is bound to the nome `q`.
    pub bindings: &'static str,
    /// Largest nome at which the identity is evaluated.
    pub max_q: Rational64,
    sides: fn(&Nome, &PrecisionContext) -> Result<Sides>,
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Identity").field("id", &self.id).finish_non_exhaustive()
    }
}

impl Identity {
    /// Evaluates both sides at `q`, rejecting nomes above [`Identity::max_q`].
    pub fn sides(&self, q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
        let ceiling = BigReal::from_ratio(&self.max_q, ctx);
        if *q.q() > ceiling {
            return Err(Error::NomeOutOfRange {
                q: q.q().to_decimal_string(12),
                max_q: ceiling.to_decimal_string(6),
            });
        }
        (self.sides)(q, ctx)
    }
}

const HALF: Rational64 = Rational64::new_raw(1, 2);

fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

fn big(v: u64, ctx: &PrecisionContext) -> BigReal {
    BigReal::from_u64(v, ctx)
}

fn root(x: &BigReal, p: i64, q: i64) -> Result<BigReal> {
    x.pow_rational(r(p, q))
}

/// `(P, Q)` for each of the four mixed modular equations.
pub fn theorem_pq(id: &str) -> Option<(EtaQuotient, EtaQuotient)> {
    let m = EtaQuotient::minus;
    Some(match id {
        "T3.1" => (
            m(r(-1, 2), &[(1, 1), (3, 1), (4, -1), (12, -1)]),
            m(r(-3, 2), &[(3, 1), (9, 1), (12, -1), (36, -1)]),
        ),
        "T3.2" => (
            m(r(1, 4), &[(1, 1), (12, 1), (3, -1), (4, -1)]),
            m(r(3, 4), &[(3, 1), (36, 1), (9, -1), (12, -1)]),
        ),
        "T3.3" => (m(r(-1, 8), &[(1, 1), (4, -1)]), m(r(-9, 8), &[(9, 1), (36, -1)])),
        "T3.4" => (
            m(r(-5, 4), &[(1, 1), (9, 1), (4, -1), (36, -1)]),
            m(r(-3, 4), &[(3, 2), (12, -2)]),
        ),
        _ => return None,
    })
}

/// `P`, `Q` and `h = P/Q + Q/P`.
fn pqh(id: &str, q: &Nome, ctx: &PrecisionContext) -> (BigReal, BigReal, BigReal) {
    let (pe, qe) = theorem_pq(id).expect("registered theorem");
    let p = pe.eval(q, ctx);
    let qq = qe.eval(q, ctx);
    let h = &p / &qq + &qq / &p;
    (p, qq, h)
}

/// `f(q) = f(q, -q²)` straight from the bilateral series.
fn f_plus_series(q: &Nome, ctx: &PrecisionContext) -> Result<BigReal> {
    let qv = q.q().with_context(ctx);
    f_general(&qv, &-qv.powi(2), ctx)
}

/// `(α(q), α(q³), α(q⁹))`.
fn moduli_1_3_9(q: &Nome, ctx: &PrecisionContext) -> Result<[Modulus; 3]> {
    Ok([
        alpha_from_nome(q, ctx)?,
        alpha_from_nome(&q.pow(3), ctx)?,
        alpha_from_nome(&q.pow(9), ctx)?,
    ])
}

/// `√z 2^{-c} (α^a (1-α)^b / q^d)^{1/24}` with `z = φ²(q)`.
fn theta_quotient_rhs(q: &Nome, ctx: &PrecisionContext, c: Rational64, a: i64, b: i64, d: i64) -> Result<BigReal> {
    let m = alpha_from_nome(q, ctx)?;
    let qv = q.q().with_context(ctx);
    let inner = m.alpha().powi(a) * m.complement().powi(b) / qv.powi(d);
    Ok(phi(q, ctx) * big(2, ctx).pow_rational(-c)? * root(&inner, 1, 24)?)
}

fn l21a(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    Ok(Sides {
        lhs: f_plus_series(q, ctx)?,
        rhs: theta_quotient_rhs(q, ctx, r(1, 6), 1, 1, 1)?,
    })
}

fn l21b(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    Ok(Sides {
        lhs: f_neg(q, ctx),
        rhs: theta_quotient_rhs(q, ctx, r(1, 6), 1, 4, 1)?,
    })
}

fn l21c(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    Ok(Sides {
        lhs: f_neg(&q.pow(4), ctx),
        rhs: theta_quotient_rhs(q, ctx, r(2, 3), 4, 1, 4)?,
    })
}

fn l22(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let f2 = f_neg(&q.pow(2), ctx);
    Ok(Sides {
        lhs: f_plus_series(q, ctx)? / &f2,
        rhs: f2.powi(2) / (f_neg(q, ctx) * f_neg(&q.pow(4), ctx)),
    })
}

/// `x + 1/x`.
fn sym(x: &BigReal) -> BigReal {
    x + x.recip()
}

fn l23(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    // β and γ are both α(q³): the degrees 1, 3, 3, 9 repeat the middle modulus
    let [a, b, d] = moduli_1_3_9(q, ctx)?;
    let g = &b;
    let low = a.alpha() * b.alpha() * a.complement() * b.complement();
    let high = g.alpha() * d.alpha() * g.complement() * d.complement();
    let k3 = root(&(big(256, ctx) * &low * &high), 1, 8)?;
    let r3 = root(&(&high / &low), 1, 8)?;
    let lhs = big(8, ctx) * sym(&k3) * (sym(&r3) + BigReal::one(ctx));
    let rhs = sym(&r3.powi(3))
        + big(10, ctx) * sym(&r3.powi(2))
        + big(19, ctx) * sym(&r3)
        + big(36, ctx);
    Ok(Sides { lhs, rhs })
}

fn d3a(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let a = alpha_from_nome(q, ctx)?;
    let b = alpha_from_nome(&q.pow(3), ctx)?;
    Ok(Sides {
        lhs: root(&(a.alpha() * b.alpha()), 1, 4)? + root(&(a.complement() * b.complement()), 1, 4)?,
        rhs: BigReal::one(ctx),
    })
}

fn d3b(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let a = alpha_from_nome(q, ctx)?;
    let b = alpha_from_nome(&q.pow(3), ctx)?;
    let lhs = (a.alpha() * b.complement()).sqrt() + (b.alpha() * a.complement()).sqrt();
    let all = a.alpha() * b.alpha() * a.complement() * b.complement();
    Ok(Sides {
        lhs,
        rhs: big(2, ctx) * root(&all, 1, 8)?,
    })
}

fn t31(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let (p, qq, h) = pqh("T3.1", q, ctx);
    let pq = &p * &qq;
    let one = BigReal::one(ctx);
    Ok(Sides {
        lhs: (&pq + big(16, ctx) / &pq) * (&h + &one),
        rhs: h.powi(3) - big(2, ctx) * h.powi(2) - big(8, ctx) * &h - big(8, ctx),
    })
}

fn t32(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let (p, qq, h) = pqh("T3.2", q, ctx);
    let s = sym(&(&p * &qq));
    Ok(Sides {
        lhs: s.powi(2),
        rhs: h.powi(2) * (s + BigReal::one(ctx)) + big(4, ctx),
    })
}

fn t33(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let (p, qq, h) = pqh("T3.3", q, ctx);
    let pq4 = (&p * &qq).powi(4);
    let c = |k: u64| big(k, ctx);
    let lhs = (&pq4 + c(256) / &pq4) * (&h + BigReal::one(ctx));
    let rhs = h.powi(6) - c(8) * h.powi(5) + c(4) * h.powi(4) + c(64) * h.powi(3)
        - c(16) * h.powi(2)
        - c(160) * &h
        - c(96);
    Ok(Sides { lhs, rhs })
}

fn t34(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let (_, qq, h) = pqh("T3.4", q, ctx);
    let q2 = qq.powi(2);
    Ok(Sides {
        lhs: h.powi(3),
        rhs: &q2 + big(16, ctx) / &q2,
    })
}

fn aux1(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let x = EtaQuotient::minus(r(-3, 8), &[(3, 1), (12, -1)]).eval(q, ctx);
    let y = EtaQuotient {
        q_exponent: r(-1, 8),
        factors: vec![
            EtaFactor { scale: 3, power: 1, sign: ThetaSign::Plus },
            EtaFactor { scale: 6, power: -1, sign: ThetaSign::Minus },
        ],
    }
    .eval(q, ctx);
    let x4 = x.powi(4);
    Ok(Sides {
        lhs: &x4 + big(16, ctx) / &x4,
        rhs: y.powi(12),
    })
}

fn e927(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let m = alpha_from_nome(q, ctx)?;
    let g = invariant_at(InvariantKind::SmallG, q, ctx)?;
    let s = m.alpha().sqrt();
    Ok(Sides {
        lhs: s.recip() - s,
        rhs: big(2, ctx) * g.powi(12),
    })
}

/// With `q = e^{-π√(n/9)}`: `α_{n/9} = α(q)`, `α_n = α(q³)`, `α_{9n} = α(q⁹)`
/// and `g_n` evaluated at `q³`.
fn prod(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let [a, _, d] = moduli_1_3_9(q, ctx)?;
    let g = invariant_at(InvariantKind::SmallG, &q.pow(3), ctx)?;
    Ok(Sides {
        lhs: d.alpha() * a.alpha() / alpha_product(&g, ctx)?,
        rhs: BigReal::one(ctx),
    })
}

fn ratio(q: &Nome, ctx: &PrecisionContext) -> Result<Sides> {
    let [a, _, d] = moduli_1_3_9(q, ctx)?;
    let g8 = invariant_at(InvariantKind::SmallG, &q.pow(3), ctx)?.powi(8);
    let x = root(&(d.alpha() / a.alpha()), 1, 8)?;
    let disc = (g8.powi(2) - &g8 + BigReal::one(ctx)).sqrt();
    Ok(Sides {
        lhs: sym(&x),
        rhs: big(2, ctx) * (g8 + disc),
    })
}

macro_rules! identity {
    ($id:literal, $stmt:literal, $bind:literal, $f:ident) => {
        Identity {
            id: $id,
            statement: $stmt,
            bindings: $bind,
            max_q: HALF,
            sides: $f,
        }
    };
}

static REGISTRY: &[Identity] = &[
    identity!("L2.1a", "f(q) = sqrt(z) 2^(-1/6) (a(1-a)/q)^(1/24)", "a = alpha(q), z = phi(q)^2", l21a),
    identity!("L2.1b", "f(-q) = sqrt(z) 2^(-1/6) (a(1-a)^4/q)^(1/24)", "a = alpha(q), z = phi(q)^2", l21b),
    identity!("L2.1c", "f(-q^4) = sqrt(z) 2^(-2/3) (a^4(1-a)/q^4)^(1/24)", "a = alpha(q), z = phi(q)^2", l21c),
    identity!("L2.2", "f(q)/f(-q^2) = f(-q^2)^2/(f(-q) f(-q^4))", "f(q) from the series f(q,-q^2)", l22),
    identity!(
        "L2.3",
        "8(K^3+K^-3)(R^3+R^-3+1) = (R^9+R^-9) + 10(R^6+R^-6) + 19(R^3+R^-3) + 36",
        "a = alpha(q), b = c = alpha(q^3), d = alpha(q^9)",
        l23
    ),
    identity!("D3a", "(ab)^(1/4) + ((1-a)(1-b))^(1/4) = 1", "a = alpha(q), b = alpha(q^3)", d3a),
    identity!(
        "D3b",
        "(a(1-b))^(1/2) + (b(1-a))^(1/2) = 2(ab(1-a)(1-b))^(1/8)",
        "a = alpha(q), b = alpha(q^3)",
        d3b
    ),
    identity!(
        "T3.1",
        "(PQ + 16/(PQ))(h+1) = h^3 - 2h^2 - 8h - 8",
        "P = f(-q)f(-q^3)/(q^(1/2)f(-q^4)f(-q^12)), Q = P at q^3, h = P/Q + Q/P",
        t31
    ),
    identity!(
        "T3.2",
        "(1/(PQ) + PQ)^2 = h^2 (1/(PQ) + PQ + 1) + 4",
        "P = q^(1/4)f(-q)f(-q^12)/(f(-q^3)f(-q^4)), Q = P at q^3, h = P/Q + Q/P",
        t32
    ),
    identity!(
        "T3.3",
        "(P^4Q^4 + 256/(P^4Q^4))(h+1) = h^6 - 8h^5 + 4h^4 + 64h^3 - 16h^2 - 160h - 96",
        "P = f(-q)/(q^(1/8)f(-q^4)), Q = P at q^9, h = P/Q + Q/P",
        t33
    ),
    identity!(
        "T3.4",
        "h^3 = Q^2 + 16/Q^2",
        "P = f(-q)f(-q^9)/(q^(5/4)f(-q^4)f(-q^36)), Q = f(-q^3)^2/(q^(3/4)f(-q^12)^2), h = P/Q + Q/P",
        t34
    ),
    identity!(
        "AUX1",
        "X^4 + 16/X^4 = (f(q^3)/(q^(1/8)f(-q^6)))^12",
        "X = f(-q^3)/(q^(3/8)f(-q^12))",
        aux1
    ),
    identity!("E9.27", "1/sqrt(a) - sqrt(a) = 2g^12", "a = alpha(q), g = g-invariant at q", e927),
    identity!(
        "PROD",
        "a9 a1 / ((sqrt(g^24+1)-g^12)^4 (sqrt(g^8+1)-g^4)^8) = 1",
        "a1 = alpha(q), a9 = alpha(q^9), g = g-invariant at q^3",
        prod
    ),
    identity!(
        "RATIO",
        "(a9/a1)^(1/8) + (a1/a9)^(1/8) = 2(g^8 + sqrt(g^16 - g^8 + 1))",
        "a1 = alpha(q), a9 = alpha(q^9), g = g-invariant at q^3",
        ratio
    ),
];

/// All registered identities in a fixed order.
pub fn identities() -> &'static [Identity] {
    REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static Identity> {
    REGISTRY
        .iter()
        .find(|i| i.id == id)
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Identifiers of all registered identities.
pub fn identity_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|i| i.id).collect()
}

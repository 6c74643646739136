//! Theta functions and infinite q-products with certified truncation.
//!
//! Series are summed until a rigorous bound on the discarded tail drops below
//! `10^-(decimal_digits + guard_digits/2)`:
//!
//! * theta-type sums whose exponents are distinct non-negative integers
//!   `e_N < e_{N+1} < …` are bounded by `q^{e_N} / (1 - q)` (doubled for `φ`);
//! * a product `(a; q)_∞` truncated after `N` factors has relative tail at most
//!   `4|a|q^N / (1 - q)` once `|a|q^N ≤ 1/2`;
//! * [`f_general`] uses the ratio of consecutive terms, which falls
//!   geometrically once `|a|·|ab|^n ≤ 1/2`.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::numerics::{BigReal, PrecisionContext};

const MAX_TERMS: usize = 200_000;

/// A nome `0 < q ≤ max_q < 1`.
#[derive(Debug, Clone)]
pub struct Nome {
    q: BigReal,
    max_q: BigReal,
}

impl Nome {
    /// Builds a nome with the default ceiling `max_q = 0.9`.
    pub fn new(q: BigReal, ctx: &PrecisionContext) -> Result<Self> {
        let ceiling = BigReal::from_ratio(&Rational64::new(9, 10), ctx);
        Self::with_ceiling(q, ceiling)
    }

    /// Builds a nome with an explicit ceiling, which must itself be below 1.
    pub fn with_ceiling(q: BigReal, max_q: BigReal) -> Result<Self> {
        let one = BigReal::from_bigint(&1.into(), max_q.precision_bits());
        if !(max_q.is_positive() && max_q < one) || !q.is_positive() || q > max_q {
            return Err(Error::NomeOutOfRange {
                q: q.to_decimal_string(12),
                max_q: max_q.to_decimal_string(6),
            });
        }
        Ok(Self { q, max_q })
    }

    /// Parses a decimal nome such as `0.1`.
    pub fn from_decimal(text: &str, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(BigReal::parse_decimal(text, ctx)?, ctx)
    }

    pub fn q(&self) -> &BigReal {
        &self.q
    }

    pub fn max_q(&self) -> &BigReal {
        &self.max_q
    }

    /// `q^k` as a nome with the same ceiling.
    pub fn pow(&self, k: u32) -> Nome {
        Nome {
            q: self.q.powi(i64::from(k)),
            max_q: self.max_q.clone(),
        }
    }

    /// `q^r` for a positive rational `r`; fails if the result exceeds the ceiling.
    pub fn pow_rational(&self, r: Rational64) -> Result<Nome> {
        Self::with_ceiling(self.q.pow_rational(r)?, self.max_q.clone())
    }

    /// `q` rounded to the precision of `ctx`.
    fn at(&self, ctx: &PrecisionContext) -> BigReal {
        self.q.with_context(ctx)
    }
}

/// How a series or product was cut off.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub terms: usize,
    pub tail_bound: BigReal,
}

fn below_target(bound: &BigReal, ctx: &PrecisionContext) -> bool {
    bound.is_zero() || bound.log2_abs() < -(ctx.tail_bits() as f64)
}

/// Sum of `sign^k q^{e_k}` over `e_k` from an exponent generator, plus the
/// `q^{e_next}/(1-q)` tail bound.
fn theta_sum(
    q: &BigReal,
    ctx: &PrecisionContext,
    multiplicity: u64,
    mut next: impl FnMut(&BigReal, usize) -> (BigReal, bool),
) -> (BigReal, Truncation) {
    let one = BigReal::one(ctx);
    let tail_scale = BigReal::from_u64(multiplicity, ctx) / (&one - q);
    let mut sum = BigReal::zero(ctx);
    let mut n = 0;
    loop {
        let (term, negative) = next(q, n);
        let bound = &term * &tail_scale;
        if below_target(&bound, ctx) || n >= MAX_TERMS {
            return (
                sum,
                Truncation {
                    terms: n,
                    tail_bound: bound,
                },
            );
        }
        sum = if negative { sum - term } else { sum + term };
        n += 1;
    }
}

/// `φ(q) = Σ_{n∈ℤ} q^{n²}` with its truncation record.
pub fn phi_series(q: &Nome, ctx: &PrecisionContext) -> (BigReal, Truncation) {
    theta3(&q.at(ctx), false, ctx)
}

/// `φ(q) = 1 + 2Σ_{n≥1} q^{n²} = (-q;q²)²_∞ (q²;q²)_∞`.
pub fn phi(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    phi_series(q, ctx).0
}

/// `φ(-q) = 1 + 2Σ_{n≥1} (-1)^n q^{n²}`.
pub fn phi_at_neg(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    theta3(&q.at(ctx), true, ctx).0
}

fn theta3(q: &BigReal, alternate: bool, ctx: &PrecisionContext) -> (BigReal, Truncation) {
    // terms q^{n²}, n ≥ 1; q^{(n+1)²} = q^{n²} q^{2n+1}
    let q2 = q * q;
    let mut power = q.clone();
    let mut step = q.clone();
    let (sum, trunc) = theta_sum(q, ctx, 2, |_, n| {
        let term = power.clone();
        step = &step * &q2;
        power = &power * &step;
        (term, alternate && n % 2 == 0)
    });
    let two = BigReal::from_u64(2, ctx);
    (BigReal::one(ctx) + two * sum, trunc)
}

/// `ψ(q) = Σ_{n≥0} q^{n(n+1)/2}` with its truncation record.
pub fn psi_series(q: &Nome, ctx: &PrecisionContext) -> (BigReal, Truncation) {
    let q = q.at(ctx);
    let mut power = BigReal::one(ctx);
    let mut step = BigReal::one(ctx);
    theta_sum(&q, ctx, 1, |q, _| {
        let term = power.clone();
        step = &step * q;
        power = &power * &step;
        (term, false)
    })
}

/// `ψ(q) = Σ_{n≥0} q^{n(n+1)/2} = (q²;q²)_∞ / (q;q²)_∞`.
pub fn psi(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    psi_series(q, ctx).0
}

/// `f(-q)` by the pentagonal-number series, with its truncation record.
pub fn f_neg_series(q: &Nome, ctx: &PrecisionContext) -> (BigReal, Truncation) {
    let q = q.at(ctx);
    // exponents 0, 1, 2, 5, 7, 12, 15, …: k(3k-1)/2 and k(3k+1)/2 for k ≥ 1
    let mut qk = BigReal::one(ctx);
    let mut pent = BigReal::one(ctx);
    let mut pending: Option<BigReal> = None;
    let mut k: u64 = 0;
    theta_sum(&q, ctx, 1, |q, n| {
        if n == 0 {
            return (BigReal::one(ctx), false);
        }
        if let Some(t) = pending.take() {
            return (t, k % 2 == 1);
        }
        // advance k: q^{k(3k-1)/2} -> q^{(k+1)(3k+2)/2} = previous · q^{3k+1}
        let q3k = qk.powi(3);
        pent = &pent * &q3k * q;
        qk = &qk * q;
        k += 1;
        pending = Some(&pent * &qk);
        (pent.clone(), k % 2 == 1)
    })
}

/// `f(-q) = Σ_{n∈ℤ} (-1)^n q^{n(3n-1)/2} = (q;q)_∞`.
pub fn f_neg(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    f_neg_series(q, ctx).0
}

/// Ramanujan's general theta function `f(a,b) = Σ_{n∈ℤ} a^{n(n+1)/2} b^{n(n-1)/2}`
/// for real `a, b` with `|ab| < 1`.
pub fn f_general(a: &BigReal, b: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    f_general_series(a, b, ctx).map(|(v, _)| v)
}

/// [`f_general`] with its truncation record.
pub fn f_general_series(
    a: &BigReal,
    b: &BigReal,
    ctx: &PrecisionContext,
) -> Result<(BigReal, Truncation)> {
    let a = a.with_context(ctx);
    let b = b.with_context(ctx);
    let ab = &a * &b;
    if ab.abs() >= BigReal::one(ctx) {
        return Err(Error::Domain {
            what: "f_general",
            value: ab.to_decimal_string(12),
            domain: "|ab| < 1",
        });
    }
    // n ≥ 0: a^{n(n+1)/2} b^{n(n-1)/2}; n = -m ≤ -1: a^{m(m-1)/2} b^{m(m+1)/2}
    let (upper, t1) = half_theta(BigReal::one(ctx), a.clone(), &ab, ctx)?;
    let (lower, t2) = half_theta(b.clone(), &b * &ab, &ab, ctx)?;
    Ok((
        upper + lower,
        Truncation {
            terms: t1.terms + t2.terms,
            tail_bound: t1.tail_bound + t2.tail_bound,
        },
    ))
}

/// Σ t_n where each ratio t_{n+1}/t_n is the previous one times `ab`.
fn half_theta(
    first: BigReal,
    first_ratio: BigReal,
    ab: &BigReal,
    ctx: &PrecisionContext,
) -> Result<(BigReal, Truncation)> {
    let half = BigReal::from_ratio(&Rational64::new(1, 2), ctx);
    let two = BigReal::from_u64(2, ctx);
    let mut term = first;
    let mut ratio = first_ratio;
    let mut sum = BigReal::zero(ctx);
    for n in 0..MAX_TERMS {
        // once the ratio is at most 1/2 (and shrinking), the tail is ≤ 2|term|
        let bound = &two * term.abs();
        if ratio.abs() <= half && below_target(&bound, ctx) {
            return Ok((
                sum,
                Truncation {
                    terms: n,
                    tail_bound: bound,
                },
            ));
        }
        sum = sum + &term;
        term = &term * &ratio;
        ratio = &ratio * ab;
    }
    Err(Error::NonConvergence {
        what: "f_general",
        terms: MAX_TERMS,
    })
}

/// `(a; q)_∞ = Π_{n≥0} (1 - a qⁿ)` with its truncation record.
pub fn qpochhammer_series(
    a: &BigReal,
    q: &Nome,
    ctx: &PrecisionContext,
) -> Result<(BigReal, Truncation)> {
    let q = q.at(ctx);
    let a = a.with_context(ctx);
    let one = BigReal::one(ctx);
    let half = BigReal::from_ratio(&Rational64::new(1, 2), ctx);
    let scale = BigReal::from_u64(4, ctx) / (&one - &q);
    let precision_floor = -(ctx.working_precision() as f64) + 8.0;
    let mut product = one.clone();
    let mut x = a.clone();
    for n in 0..MAX_TERMS {
        let mag = x.abs();
        let bound = &mag * &scale;
        if mag <= half && below_target(&bound, ctx) {
            return Ok((
                product,
                Truncation {
                    terms: n,
                    tail_bound: bound,
                },
            ));
        }
        let factor = &one - &x;
        if factor.is_zero() || factor.log2_abs() < precision_floor {
            return Err(Error::ZeroFactor { index: n });
        }
        product = product * factor;
        x = &x * &q;
    }
    Err(Error::NonConvergence {
        what: "qpochhammer",
        terms: MAX_TERMS,
    })
}

/// `(a; q)_∞`.
pub fn qpochhammer(a: &BigReal, q: &Nome, ctx: &PrecisionContext) -> Result<BigReal> {
    qpochhammer_series(a, q, ctx).map(|(v, _)| v)
}

/// `χ(q) = (-q; q²)_∞`.
pub fn chi(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    qpochhammer(&-q.at(ctx), &q.pow(2), ctx).expect("factors 1 + q^{2n+1} never vanish")
}

/// `χ(-q) = (q; q²)_∞`.
pub fn chi_at_neg(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    qpochhammer(&q.at(ctx), &q.pow(2), ctx).expect("factors 1 - q^{2n+1} never vanish for q < 1")
}

/// `f(q) = f(-q²)³ / (f(-q) f(-q⁴))`.
pub fn f_pos(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    let f2 = f_neg(&q.pow(2), ctx);
    f2.powi(3) / (f_neg(q, ctx) * f_neg(&q.pow(4), ctx))
}

/// A nome written either as a decimal or as `e^{-π√n}` for a rational `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NomeSpec {
    Decimal(String),
    Singular(Rational64),
}

impl NomeSpec {
    /// Accepts `0.1`, `exp(-pi*sqrt(4/9))`, `e^-pi*sqrt(2)` and `e^(-pi*sqrt(2))`.
    pub fn parse(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let body = ["exp(-pi*sqrt(", "e^(-pi*sqrt(", "e^-pi*sqrt("]
            .iter()
            .find_map(|prefix| compact.strip_prefix(prefix).map(|rest| (*prefix, rest)));
        let bad = |message: &str| Error::Syntax {
            offset: 0,
            message: format!("`{text}`: {message}"),
        };
        match body {
            Some((prefix, rest)) => {
                let closing = if prefix == "e^-pi*sqrt(" { ")" } else { "))" };
                let inner = rest
                    .strip_suffix(closing)
                    .ok_or_else(|| bad("unbalanced parentheses"))?;
                let n = parse_rational(inner).ok_or_else(|| bad("expected a rational under sqrt"))?;
                if *n.numer() <= 0 {
                    return Err(Error::NonPositive { what: "nome exponent" });
                }
                Ok(NomeSpec::Singular(n))
            }
            None => {
                crate::numerics::parse_decimal_rational(&compact)
                    .ok_or_else(|| bad("expected a decimal or exp(-pi*sqrt(n))"))?;
                Ok(NomeSpec::Decimal(compact))
            }
        }
    }

    pub fn to_nome(&self, ctx: &PrecisionContext) -> Result<Nome> {
        match self {
            NomeSpec::Decimal(s) => Nome::from_decimal(s, ctx),
            NomeSpec::Singular(n) => crate::numerics::nome_from_n(*n, ctx),
        }
    }
}

impl std::fmt::Display for NomeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NomeSpec::Decimal(s) => f.write_str(s),
            NomeSpec::Singular(n) => write!(f, "exp(-pi*sqrt({n}))"),
        }
    }
}

/// `p`, `p/q`, with an optional leading minus.
pub(crate) fn parse_rational(text: &str) -> Option<Rational64> {
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>().ok()?, q.trim().parse::<i64>().ok()?),
        None => (text.trim().parse::<i64>().ok()?, 1),
    };
    (q != 0).then(|| Rational64::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    fn nome(s: &str, ctx: &PrecisionContext) -> Nome {
        Nome::from_decimal(s, ctx).unwrap()
    }

    #[test]
    fn nome_bounds() {
        let c = make_context(20).unwrap();
        assert!(Nome::from_decimal("0", &c).is_err());
        assert!(Nome::from_decimal("-0.1", &c).is_err());
        assert!(Nome::from_decimal("0.95", &c).is_err());
        assert!(Nome::from_decimal("0.9", &c).is_ok());
        let q = nome("0.5", &c);
        assert!(q.pow_rational(Rational64::new(1, 8)).is_err());
    }

    #[test]
    fn small_q_limits_are_one() {
        let c = make_context(30).unwrap();
        let q = nome("1e-40", &c);
        let one = BigReal::one(&c);
        let tol = BigReal::pow10(-38, &c);
        for v in [phi(&q, &c), psi(&q, &c), f_neg(&q, &c), chi(&q, &c), f_pos(&q, &c)] {
            assert!((v - &one).abs() < tol);
        }
    }

    #[test]
    fn pochhammer_edge_cases() {
        let c = make_context(30).unwrap();
        let q = nome("0.3", &c);
        let v = qpochhammer(&BigReal::zero(&c), &q, &c).unwrap();
        assert_eq!(v, BigReal::one(&c));
        // a = 1/q² makes the factor n = 2 vanish
        let a = BigReal::one(&c) / q.q().powi(2);
        assert_eq!(qpochhammer(&a, &q, &c).unwrap_err(), Error::ZeroFactor { index: 2 });
    }

    #[test]
    fn f_general_rejects_divergent_arguments() {
        let c = make_context(20).unwrap();
        let a = BigReal::from_u64(2, &c);
        let b = BigReal::from_ratio(&Rational64::new(1, 2), &c);
        assert!(matches!(f_general(&a, &b, &c), Err(Error::Domain { .. })));
    }

    #[test]
    fn truncation_tail_is_below_target() {
        let c = make_context(50).unwrap();
        let target = c.tail_target();
        for s in ["0.05", "0.5", "0.9"] {
            let q = nome(s, &c);
            for (_, t) in [phi_series(&q, &c), psi_series(&q, &c), f_neg_series(&q, &c)] {
                assert!(t.tail_bound < target, "q={s}");
                assert!(t.terms > 0);
            }
            let (_, t) = qpochhammer_series(q.q(), &q, &c).unwrap();
            assert!(t.tail_bound < target);
        }
    }

    #[test]
    fn nome_specs() {
        let r = |p, q| NomeSpec::Singular(Rational64::new(p, q));
        assert_eq!(NomeSpec::parse("exp(-pi*sqrt(4/9))").unwrap(), r(4, 9));
        assert_eq!(NomeSpec::parse("e^-pi*sqrt(2)").unwrap(), r(2, 1));
        assert_eq!(NomeSpec::parse("e^(-pi * sqrt(36))").unwrap(), r(36, 1));
        assert_eq!(NomeSpec::parse("0.1").unwrap(), NomeSpec::Decimal("0.1".into()));
        assert!(NomeSpec::parse("exp(-pi*sqrt(0))").is_err());
        assert!(NomeSpec::parse("exp(-pi*sqrt(2)").is_err());
        assert!(NomeSpec::parse("q").is_err());
        assert_eq!(NomeSpec::parse(&r(8, 9).to_string()).unwrap(), r(8, 9));
    }
}

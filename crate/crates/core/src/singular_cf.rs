//! Singular moduli `α_{9n}`, `α_{n/9}` from the class invariant `g_n`, and the
//! Ramanujan–Selberg continued fractions
//!
//! ```text
//! S₁(q) = q^{1/8} / (1 + q/(1 + (q+q²)/(1 + q³/(1 + (q²+q⁴)/(1 + …)))))
//!       = q^{1/8} (-q²;q²)_∞ / (-q;q²)_∞
//! S₂(q) = q^{1/8} (-q²;q²)_∞ / (q;q²)_∞
//! ```
//!
//! The partial numerators follow `a_{2k-1} = q^{2k-1}`, `a_{2k} = q^k + q^{2k}`;
//! `S₂` uses the same law at `-q`. The product forms are authoritative and the
//! continued fractions are checked against them.
//!
//! Every closed formula here contains differences `√X - √Y` with `X - Y` known
//! exactly. They are evaluated as `(X - Y)/(√X + √Y)` so that no digits are lost
//! when the two roots are close.

use num_rational::Rational64;

use crate::elliptic::singular_alpha;
use crate::error::{Error, Result};
use crate::numerics::{nome_from_n, BigReal, PrecisionContext};
use crate::qseries::{qpochhammer, Nome};

/// Which of the two moduli a formula produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `α_{9n}`, the smaller modulus; the inner difference takes `-`.
    NineN,
    /// `α_{n/9}`, the larger modulus; the inner difference takes `+`.
    NOverNine,
}

/// A truncated continued fraction evaluation.
#[derive(Debug, Clone)]
pub struct CFState {
    pub terms_used: usize,
    pub convergent: BigReal,
    pub prev_convergent: BigReal,
}

/// `√((c + 1 + s)/2) ∓ √((c - 1 + s)/2)`, whose two radicands differ by 1.
fn inner(c: &BigReal, s: &BigReal, branch: Branch, ctx: &PrecisionContext) -> BigReal {
    let one = BigReal::one(ctx);
    let two = BigReal::from_u64(2, ctx);
    let upper = ((c + &one + s) / &two).sqrt();
    let lower = ((c - &one + s) / &two).sqrt();
    match branch {
        Branch::NineN => (upper + lower).recip(),
        Branch::NOverNine => upper + lower,
    }
}

/// The three factors of the `g_n` formulas:
/// `√(g²⁴+1) - g¹²`, `√(g⁸+1) - g⁴` and the inner difference.
fn g_factors(g: &BigReal, branch: Branch, ctx: &PrecisionContext) -> Result<[BigReal; 3]> {
    if !g.is_positive() {
        return Err(Error::NonPositive { what: "class invariant g" });
    }
    let one = BigReal::one(ctx);
    let g4 = g.with_context(ctx).powi(4);
    let g8 = g4.powi(2);
    let g12 = &g8 * &g4;
    let first = ((g12.powi(2) + &one).sqrt() + &g12).recip();
    let second = ((&g8 + &one).sqrt() + &g4).recip();
    let s = (g8.powi(2) - &g8 + &one).sqrt();
    Ok([first, second, inner(&g8, &s, branch, ctx)])
}

/// The three factors of the `G_n` formulas:
/// `G¹² - √(G²⁴-1)`, `G⁴ - √(G⁸-1)` and the inner difference.
fn big_g_factors(big_g: &BigReal, branch: Branch, ctx: &PrecisionContext) -> Result<[BigReal; 3]> {
    let one = BigReal::one(ctx);
    if *big_g < one {
        return Err(Error::Domain {
            what: "s2_from_G",
            value: big_g.to_decimal_string(12),
            domain: "G >= 1",
        });
    }
    let g4 = big_g.with_context(ctx).powi(4);
    let g8 = g4.powi(2);
    let g12 = &g8 * &g4;
    let first = (&g12 + (g12.powi(2) - &one).sqrt()).recip();
    let second = (&g4 + (&g8 - &one).sqrt()).recip();
    let s = (g8.powi(2) + &g8 + &one).sqrt();
    Ok([first, second, inner(&g8, &s, branch, ctx)])
}

fn alpha_from_factors([a, b, c]: [BigReal; 3]) -> BigReal {
    a.powi(2) * b.powi(4) * c.powi(8)
}

/// `α_{9n} = (√(g²⁴+1) - g¹²)² (√(g⁸+1) - g⁴)⁴ (√((g⁸+1+s)/2) - √((g⁸-1+s)/2))⁸`
/// with `s = √(g¹⁶ - g⁸ + 1)` and `g = g_n`.
pub fn alpha_9n(g: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    g_factors(g, Branch::NineN, ctx).map(alpha_from_factors)
}

/// `α_{n/9}`: as [`alpha_9n`] with `+` in the last factor.
pub fn alpha_n_over_9(g: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    g_factors(g, Branch::NOverNine, ctx).map(alpha_from_factors)
}

/// `α_{9n} α_{n/9} = (√(g²⁴+1) - g¹²)⁴ (√(g⁸+1) - g⁴)⁸`.
pub fn alpha_product(g: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let [a, b, _] = g_factors(g, Branch::NineN, ctx)?;
    Ok(a.powi(4) * b.powi(8))
}

fn s_from_factors([a, b, c]: [BigReal; 3], ctx: &PrecisionContext) -> BigReal {
    let root2 = BigReal::from_u64(2, ctx).sqrt();
    a.pow_rational_unchecked(Rational64::new(1, 4)) * b.sqrt() * c / root2
}

/// `S₁(e^{-3π√n})` (branch `NineN`) or `S₁(e^{-π√n/3})` (branch `NOverNine`)
/// from `g_n`; equals `α^{1/8}/√2` for the corresponding modulus.
pub fn s1_from_g(g: &BigReal, branch: Branch, ctx: &PrecisionContext) -> Result<BigReal> {
    Ok(s_from_factors(g_factors(g, branch, ctx)?, ctx))
}

/// `S₂(e^{-3π√n})` or `S₂(e^{-π√n/3})` from `G_n ≥ 1`.
#[allow(non_snake_case)]
pub fn s2_from_G(big_g: &BigReal, branch: Branch, ctx: &PrecisionContext) -> Result<BigReal> {
    Ok(s_from_factors(big_g_factors(big_g, branch, ctx)?, ctx))
}

fn eighth_root_q(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    q.q().with_context(ctx).pow_rational_unchecked(Rational64::new(1, 8))
}

/// `q^{1/8} (-q²;q²)_∞ / (±q;q²)_∞`.
fn selberg_product(q: &Nome, sign: i64, ctx: &PrecisionContext) -> BigReal {
    let qv = q.q().with_context(ctx);
    let q2 = q.pow(2);
    let num = qpochhammer(&-qv.powi(2), &q2, ctx).expect("1 + q^{2n} never vanishes");
    let den = qpochhammer(&(BigReal::from_i64(-sign, ctx) * qv), &q2, ctx)
        .expect("1 ± q^{2n+1} never vanishes for q < 1");
    eighth_root_q(q, ctx) * num / den
}

/// `S₁(q) = q^{1/8} (-q²;q²)_∞ / (-q;q²)_∞`.
pub fn s1_product(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    selberg_product(q, 1, ctx)
}

/// `S₂(q) = q^{1/8} (-q²;q²)_∞ / (q;q²)_∞`.
pub fn s2_product(q: &Nome, ctx: &PrecisionContext) -> BigReal {
    selberg_product(q, -1, ctx)
}

/// Partial numerators `a_1 … a_depth` for the continued fraction at `x`
/// (`x = q` for `S₁`, `x = -q` for `S₂`).
fn numerators(x: &BigReal, depth: usize) -> Vec<BigReal> {
    let x2 = x.powi(2);
    let mut out = Vec::with_capacity(depth);
    let mut odd = x.clone(); // x^{2k-1}
    let mut xk = x.clone(); // x^k
    let mut x2k = x2.clone(); // x^{2k}
    while out.len() < depth {
        out.push(odd.clone());
        if out.len() < depth {
            out.push(&xk + &x2k);
        }
        odd = &odd * &x2;
        xk = &xk * x;
        x2k = &x2k * &x2;
    }
    out
}

/// `q^{1/8} / (1 + a_1/(1 + a_2/(1 + … a_depth)))`, evaluated bottom-up.
fn cf_value(
    x: &BigReal,
    eighth: &BigReal,
    depth: usize,
    ctx: &PrecisionContext,
) -> Result<BigReal> {
    let one = BigReal::one(ctx);
    let mut tail = one.clone();
    for a in numerators(x, depth).iter().rev() {
        if tail.is_zero() {
            return Err(Error::NonConvergence {
                what: "continued fraction",
                terms: depth,
            });
        }
        tail = &one + a / &tail;
    }
    if tail.is_zero() {
        return Err(Error::NonConvergence {
            what: "continued fraction",
            terms: depth,
        });
    }
    Ok(eighth / tail)
}

fn adaptive_cf(
    q: &Nome,
    sign: i64,
    max_terms: usize,
    ctx: &PrecisionContext,
) -> Result<CFState> {
    if max_terms < 4 {
        return Err(Error::Domain {
            what: "continued fraction",
            value: max_terms.to_string(),
            domain: "max_terms >= 4",
        });
    }
    let x = BigReal::from_i64(sign, ctx) * q.q().with_context(ctx);
    let eighth = eighth_root_q(q, ctx);
    let target = ctx.tolerance(0);
    let mut depth = 4;
    let mut prev = cf_value(&x, &eighth, depth, ctx)?;
    while depth < max_terms {
        let next_depth = (depth * 2).min(max_terms);
        let current = cf_value(&x, &eighth, next_depth, ctx)?;
        if (&current - &prev).abs() < target {
            return Ok(CFState {
                terms_used: next_depth,
                convergent: current,
                prev_convergent: prev,
            });
        }
        prev = current;
        depth = next_depth;
    }
    Err(Error::NonConvergence {
        what: "continued fraction",
        terms: max_terms,
    })
}

/// `S₁(q)` by its continued fraction, doubling the depth from 4 until two
/// successive convergents agree to `10^-decimal_digits`.
pub fn s1_cf(q: &Nome, max_terms: usize, ctx: &PrecisionContext) -> Result<CFState> {
    adaptive_cf(q, 1, max_terms, ctx)
}

/// `S₂(q)` by its continued fraction with numerators `-q, -q+q², -q³, q²+q⁴, …`.
pub fn s2_cf(q: &Nome, max_terms: usize, ctx: &PrecisionContext) -> Result<CFState> {
    adaptive_cf(q, -1, max_terms, ctx)
}

/// `S₁(e^{-π√n}) = α_n^{1/8}/√2`.
pub fn s1_singular(n: Rational64, ctx: &PrecisionContext) -> Result<BigReal> {
    let m = singular_alpha(n, ctx)?;
    let root2 = BigReal::from_u64(2, ctx).sqrt();
    Ok(m.alpha().pow_rational_unchecked(Rational64::new(1, 8)) / root2)
}

/// `S₁(e^{-π√n})` straight from the product form.
pub fn s1_product_at(n: Rational64, ctx: &PrecisionContext) -> Result<BigReal> {
    Ok(s1_product(&nome_from_n(n, ctx)?, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    fn close(a: &BigReal, b: &BigReal, ctx: &PrecisionContext, loss: u32) -> bool {
        (a - b).abs() < ctx.tolerance(loss)
    }

    #[test]
    fn numerator_pattern() {
        let c = make_context(20).unwrap();
        let x = BigReal::from_ratio(&Rational64::new(1, 10), &c);
        let a = numerators(&x, 5);
        let expected = [
            Rational64::new(1, 10),
            Rational64::new(11, 100),
            Rational64::new(1, 1000),
            Rational64::new(101, 10000),
            Rational64::new(1, 100000),
        ];
        for (v, e) in a.iter().zip(expected) {
            assert!(close(v, &BigReal::from_ratio(&e, &c), &c, 0));
        }
    }

    #[test]
    fn s1_at_e_minus_pi() {
        let c = make_context(40).unwrap();
        let q = nome_from_n(Rational64::from_integer(1), &c).unwrap();
        let expected = BigReal::from_u64(2, &c).pow_rational(Rational64::new(-5, 8)).unwrap();
        assert!(close(&s1_product(&q, &c), &expected, &c, 2));
        let cf = s1_cf(&q, 1024, &c).unwrap();
        assert!(close(&cf.convergent, &expected, &c, 2));
        assert!(cf.terms_used >= 8);
    }

    #[test]
    fn cf_matches_product_for_both_fractions() {
        let c = make_context(40).unwrap();
        for s in ["0.01", "0.1", "0.3"] {
            let q = Nome::from_decimal(s, &c).unwrap();
            assert!(close(&s1_cf(&q, 4096, &c).unwrap().convergent, &s1_product(&q, &c), &c, 2));
            assert!(close(&s2_cf(&q, 4096, &c).unwrap().convergent, &s2_product(&q, &c), &c, 2));
        }
    }

    #[test]
    fn cf_reports_non_convergence() {
        let c = make_context(40).unwrap();
        let q = Nome::from_decimal("0.5", &c).unwrap();
        assert!(matches!(s1_cf(&q, 8, &c), Err(Error::NonConvergence { .. })));
        assert!(s1_cf(&q, 3, &c).is_err());
    }

    #[test]
    fn g_formulas_reject_bad_input() {
        let c = make_context(20).unwrap();
        assert!(alpha_9n(&BigReal::zero(&c), &c).is_err());
        let below_one = BigReal::from_ratio(&Rational64::new(1, 2), &c);
        assert!(s2_from_G(&below_one, Branch::NineN, &c).is_err());
    }

    #[test]
    fn big_g_one_matches_product_at_e_minus_pi() {
        // G_1 = 1 feeds the n = 1 formulas: S₂(e^{-3π}) and S₂(e^{-π/3})
        let c = make_context(40).unwrap();
        let one = BigReal::one(&c);
        let q9 = nome_from_n(Rational64::from_integer(9), &c).unwrap();
        let q19 = nome_from_n(Rational64::new(1, 9), &c).unwrap();
        let nine = s2_from_G(&one, Branch::NineN, &c).unwrap();
        let ninth = s2_from_G(&one, Branch::NOverNine, &c).unwrap();
        assert!((&nine - s2_product(&q9, &c)).abs() / &nine < c.tolerance(5));
        assert!((&ninth - s2_product(&q19, &c)).abs() / &ninth < c.tolerance(5));
    }

    #[test]
    fn branches_bracket_alpha_n() {
        let c = make_context(40).unwrap();
        let g4 = BigReal::from_u64(2, &c).pow_rational(Rational64::new(1, 8)).unwrap();
        let small = alpha_9n(&g4, &c).unwrap();
        let large = alpha_n_over_9(&g4, &c).unwrap();
        let alpha4 = singular_alpha(Rational64::from_integer(4), &c).unwrap();
        assert!(small < *alpha4.alpha() && *alpha4.alpha() < large);
        let product = alpha_product(&g4, &c).unwrap();
        assert!((&small * &large - &product).abs() / &product < c.tolerance(5));
    }
}

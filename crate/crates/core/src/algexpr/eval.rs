use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::numerics::{big_to_rational64, make_context, BigReal, PrecisionContext};

/// Evaluates `e` at the working precision of `ctx`.
///
/// Square roots and even-denominator powers of negative values are errors
/// naming the offending subtree; odd-denominator roots of negatives are real.
pub fn eval_expr(e: &Expr, ctx: &PrecisionContext) -> Result<BigReal> {
    Ok(match e {
        Expr::Int(n) => BigReal::from_bigint(n, ctx.working_precision()),
        Expr::Rat(r) => BigReal::from_big_rational(r, ctx),
        Expr::Add(items) => items
            .iter()
            .try_fold(BigReal::zero(ctx), |acc, x| Ok::<_, Error>(acc + eval_expr(x, ctx)?))?,
        Expr::Mul(items) => items
            .iter()
            .try_fold(BigReal::one(ctx), |acc, x| Ok::<_, Error>(acc * eval_expr(x, ctx)?))?,
        Expr::Neg(x) => -eval_expr(x, ctx)?,
        Expr::Div(n, d) => {
            let den = eval_expr(d, ctx)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero { subtree: d.to_string() });
            }
            eval_expr(n, ctx)? / den
        }
        Expr::Sqrt(x) => {
            let v = eval_expr(x, ctx)?;
            if v.is_negative() {
                return Err(Error::NegativeRadicand { subtree: x.to_string() });
            }
            v.sqrt()
        }
        Expr::Pow(b, r) => {
            let base = eval_expr(b, ctx)?;
            if r.is_integer() {
                let k = r.to_integer().to_i64().ok_or_else(|| Error::Domain {
                    what: "eval_expr",
                    value: r.to_string(),
                    domain: "integer exponents fit in 64 bits",
                })?;
                if k < 0 && base.is_zero() {
                    return Err(Error::DivisionByZero { subtree: e.to_string() });
                }
                return Ok(base.powi(k));
            }
            if base.is_zero() {
                if r.is_negative() {
                    return Err(Error::DivisionByZero { subtree: e.to_string() });
                }
                return Ok(BigReal::zero(ctx));
            }
            let negative = base.is_negative();
            if negative && r.denom().is_even() {
                return Err(Error::NegativeRadicand { subtree: b.to_string() });
            }
            let magnitude = base.abs();
            let value = match big_to_rational64(r) {
                Some(small) => magnitude.pow_rational(small)?,
                None => {
                    let wide = ctx.escalated(10);
                    let exponent = BigReal::from_big_rational(r, &wide);
                    (exponent * magnitude.with_context(&wide).ln()).exp().with_context(ctx)
                }
            };
            if negative && r.numer().is_odd() {
                -value
            } else {
                value
            }
        }
    })
}

/// `true` iff `|e1 - e2| < 10^-digits`, both evaluated with `digits + 30`
/// decimal digits.
pub fn equal_numeric(e1: &Expr, e2: &Expr, digits: u32) -> Result<bool> {
    let ctx = make_context(digits + 30)?;
    let a = eval_expr(e1, &ctx)?;
    let b = eval_expr(e2, &ctx)?;
    let bound = BigReal::pow10(-i64::from(digits), &ctx);
    Ok((a - b).abs() < bound)
}

/// Relative gap `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_difference(a: &BigReal, b: &BigReal) -> BigReal {
    let scale = a.abs().max(&b.abs());
    if scale.is_zero() {
        return scale;
    }
    (a - b).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algexpr::parse;

    fn eval(text: &str, digits: u32) -> Result<BigReal> {
        eval_expr(&parse(text)?, &make_context(digits)?)
    }

    #[test]
    fn sqrt_two() {
        let v = eval("sqrt(2)", 40).unwrap();
        assert!(v.to_decimal_string(21).starts_with("1.4142135623730950488"));
        let c = make_context(40).unwrap();
        assert!((&v * &v - BigReal::from_u64(2, &c)).abs() < c.tolerance(0));
    }

    #[test]
    fn errors_name_the_subtree() {
        assert_eq!(
            eval("sqrt(1-sqrt(4))", 20),
            Err(Error::NegativeRadicand { subtree: "1-sqrt(4)".into() })
        );
        assert_eq!(
            eval("1/(sqrt(4)-2)", 20),
            Err(Error::DivisionByZero { subtree: "sqrt(4)-2".into() })
        );
        assert!(matches!(eval("(-8)^(1/2)", 20), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn odd_roots_of_negatives_are_real() {
        let c = make_context(30).unwrap();
        let v = eval("(-8)^(1/3)", 30).unwrap();
        assert!((v + BigReal::from_u64(2, &c)).abs() < c.tolerance(0));
        let w = eval("(-8)^(2/3)", 30).unwrap();
        assert!((w - BigReal::from_u64(4, &c)).abs() < c.tolerance(0));
    }

    #[test]
    fn numeric_equality() {
        let a = parse("(sqrt(2)-1)^2").unwrap();
        let b = parse("3-2*sqrt(2)").unwrap();
        assert!(equal_numeric(&a, &b, 50).unwrap());
        assert!(!equal_numeric(&parse("sqrt(2)").unwrap(), &parse("1.414").unwrap(), 50).unwrap());
    }
}

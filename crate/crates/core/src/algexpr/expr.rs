use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact algebraic expression over the rationals with radicals.
///
/// Trees produced by the parser are canonical: `Int` and `Rat` are
/// non-negative, sums and products are flattened, and `Div` never has two
/// literal operands (those fold into `Rat`). Rendering a canonical tree with
/// [`fmt::Display`] and parsing the text back yields the same tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Rat(BigRational),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, BigRational),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Self {
        Expr::Int(BigInt::from(v))
    }

    pub fn rat(p: i64, q: i64) -> Self {
        Expr::Rat(BigRational::new(p.into(), q.into()))
    }

    pub fn sqrt(e: Expr) -> Self {
        Expr::Sqrt(Box::new(e))
    }

    pub fn pow(base: Expr, p: i64, q: i64) -> Self {
        Expr::Pow(Box::new(base), BigRational::new(p.into(), q.into()))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Int(_) | Expr::Rat(_))
    }

    /// The exact value if the tree contains no radicals.
    pub fn exact_value(&self) -> Option<BigRational> {
        match self {
            Expr::Int(n) => Some(BigRational::from_integer(n.clone())),
            Expr::Rat(r) => Some(r.clone()),
            Expr::Add(items) => items
                .iter()
                .try_fold(BigRational::zero(), |acc, e| Some(acc + e.exact_value()?)),
            Expr::Mul(items) => items
                .iter()
                .try_fold(BigRational::one(), |acc, e| Some(acc * e.exact_value()?)),
            Expr::Neg(e) => e.exact_value().map(|v| -v),
            Expr::Div(n, d) => {
                let d = d.exact_value()?;
                if d.is_zero() {
                    return None;
                }
                Some(n.exact_value()? / d)
            }
            Expr::Pow(b, r) => {
                if !r.is_integer() {
                    return None;
                }
                let b = b.exact_value()?;
                let k: i32 = r.to_integer().try_into().ok()?;
                if k < 0 && b.is_zero() {
                    return None;
                }
                Some(num_traits::Pow::pow(b, k))
            }
            Expr::Sqrt(_) => None,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + match self {
            Expr::Int(_) | Expr::Rat(_) => 0,
            Expr::Add(v) | Expr::Mul(v) => v.iter().map(Expr::size).sum(),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Sqrt(e) => e.size(),
            Expr::Div(n, d) => n.size() + d.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Int(n) if n.is_negative() => 1,
            Expr::Int(_) | Expr::Rat(_) | Expr::Sqrt(_) => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Rat(r) => write!(f, "({}/{})", r.numer(), r.denom()),
            Expr::Add(items) => {
                for (i, item) in items.iter().enumerate() {
                    match item {
                        Expr::Neg(inner) if i > 0 => {
                            f.write_str("-")?;
                            inner.write_at(f, 2)?;
                        }
                        _ => {
                            if i > 0 {
                                f.write_str("+")?;
                            }
                            item.write_at(f, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    item.write_at(f, 3)?;
                }
                Ok(())
            }
            Expr::Div(n, d) => {
                n.write_at(f, 2)?;
                f.write_str("/")?;
                d.write_at(f, 3)
            }
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_at(f, 3)
            }
            Expr::Pow(b, r) => {
                b.write_at(f, 5)?;
                if r.is_integer() {
                    write!(f, "^({})", r.numer())
                } else {
                    write!(f, "^({}/{})", r.numer(), r.denom())
                }
            }
            Expr::Sqrt(e) => {
                f.write_str("sqrt(")?;
                e.write_at(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_with_minimal_parentheses() {
        let e = Expr::Add(vec![Expr::sqrt(Expr::int(2)), Expr::Neg(Box::new(Expr::int(1)))]);
        assert_eq!(e.to_string(), "sqrt(2)-1");
        let p = Expr::pow(e.clone(), 4, 1);
        assert_eq!(p.to_string(), "(sqrt(2)-1)^(4)");
        assert_eq!(Expr::rat(1, 8).to_string(), "(1/8)");
        assert_eq!(Expr::pow(Expr::int(2), -1, 8).to_string(), "2^(-1/8)");
        let m = Expr::Mul(vec![Expr::Neg(Box::new(Expr::int(3))), Expr::Add(vec![Expr::int(1), Expr::int(2)])]);
        assert_eq!(m.to_string(), "-3*(1+2)");
    }

    #[test]
    fn exact_values() {
        let e = Expr::Div(
            Box::new(Expr::Add(vec![Expr::int(1), Expr::rat(1, 2)])),
            Box::new(Expr::pow(Expr::int(3), 2, 1)),
        );
        assert_eq!(e.exact_value(), Some(BigRational::new(1.into(), 6.into())));
        assert_eq!(Expr::sqrt(Expr::int(4)).exact_value(), None);
    }
}

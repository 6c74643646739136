//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := '-'? integer ('^' exponent)? | '(' expr ')'
//! atom     := integer | decimal | '(' expr ')' | 'sqrt' '(' expr ')'
//! ```
//!
//! Exponents must be exact rationals. Offsets in errors are byte offsets.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::numerics::parse_decimal_rational;

/// Parses `text` into a canonical [`Expr`].
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut items = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                items.push(self.term()?);
            } else if self.eat(b'-') {
                items.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { Expr::Add(items) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                factors.push(self.unary()?);
            } else if self.peek() == Some(b'/') {
                self.pos += 1;
                let at = self.pos;
                let den = self.unary()?;
                let num = collapse(std::mem::take(&mut factors));
                factors.push(divide(num, den, at)?);
            } else {
                break;
            }
        }
        Ok(collapse(factors))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let r = self.exponent()?;
            Ok(Expr::Pow(Box::new(base), r))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<BigRational> {
        self.skip_ws();
        let start = self.pos;
        if self.eat(b'(') {
            let inner = self.expr()?;
            self.expect(b')')?;
            return inner.exact_value().ok_or(Error::Syntax {
                offset: start,
                message: "exponent must be an exact rational".into(),
            });
        }
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error("expected an exponent"));
        }
        let mut r = BigRational::from_integer(digits.parse::<BigInt>().expect("ascii digits"));
        if negative {
            r = -r;
        }
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let at = self.pos;
            let outer = self.exponent()?;
            let k: i32 = (outer.is_integer())
                .then(|| outer.to_integer().try_into().ok())
                .flatten()
                .ok_or(Error::Syntax {
                    offset: at,
                    message: "iterated exponent must be a small integer".into(),
                })?;
            if k < 0 && r.is_zero() {
                return Err(Error::Syntax {
                    offset: at,
                    message: "zero raised to a negative power".into(),
                });
            }
            r = num_traits::Pow::pow(r, k);
        }
        Ok(r)
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                self.digits();
                if self.pos < self.src.len() && self.src[self.pos] == b'.' {
                    self.pos += 1;
                    self.digits();
                    let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                    let r = parse_decimal_rational(text).ok_or(Error::Syntax {
                        offset: start,
                        message: format!("malformed number `{text}`"),
                    })?;
                    Ok(Expr::Rat(r))
                } else {
                    let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                    Ok(Expr::Int(text.parse().expect("ascii digits")))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if name != "sqrt" {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unknown function `{name}`"),
                    });
                }
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(Expr::sqrt(e))
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn collapse(mut factors: Vec<Expr>) -> Expr {
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Mul(factors)
    }
}

/// `num / den`, folding two literals into one exact rational.
fn divide(num: Expr, den: Expr, at: usize) -> Result<Expr> {
    if let Some(d) = den.is_literal().then(|| den.exact_value()).flatten() {
        if d.is_zero() {
            return Err(Error::Syntax {
                offset: at,
                message: "zero denominator".into(),
            });
        }
        if num.is_literal() {
            let n = num.exact_value().expect("literal");
            debug_assert!(!n.is_negative());
            return Ok(Expr::Rat(n / d));
        }
    }
    Ok(Expr::Div(Box::new(num), Box::new(den)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syntax_offset(text: &str) -> usize {
        match parse(text) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn subtraction_is_addition_of_a_negation() {
        let e = parse("sqrt(2)-1").unwrap();
        assert_eq!(
            e,
            Expr::Add(vec![Expr::sqrt(Expr::int(2)), Expr::Neg(Box::new(Expr::int(1)))])
        );
    }

    #[test]
    fn precedence_and_associativity() {
        // unary minus binds looser than ^
        assert_eq!(
            parse("-2^2").unwrap(),
            Expr::Neg(Box::new(Expr::pow(Expr::int(2), 2, 1)))
        );
        // ^ is right-associative: 2^3^2 = 2^9
        assert_eq!(parse("2^3^2").unwrap(), Expr::pow(Expr::int(2), 9, 1));
        assert_eq!(parse("2^(1/8)").unwrap(), Expr::pow(Expr::int(2), 1, 8));
        assert_eq!(parse("2^(-1/8)").unwrap(), Expr::pow(Expr::int(2), -1, 8));
        assert_eq!(parse("1/2/3").unwrap(), Expr::rat(1, 6));
        assert_eq!(parse("0.25").unwrap(), Expr::rat(1, 4));
        assert!(matches!(parse("1+2*3").unwrap(), Expr::Add(v) if matches!(v[1], Expr::Mul(_))));
    }

    #[test]
    fn reports_offsets() {
        assert_eq!(syntax_offset("2^^3"), 2);
        assert_eq!(syntax_offset("1/0"), 2);
        assert_eq!(syntax_offset("sqrt(2"), 6);
        assert_eq!(syntax_offset("foo(2)"), 0);
        assert_eq!(syntax_offset("2^(sqrt(2))"), 2);
        assert_eq!(syntax_offset(""), 0);
        assert_eq!(syntax_offset("1 2"), 2);
    }

    #[test]
    fn nested_closed_form_parses() {
        let e = parse("(sqrt(2)-1)^(4) * (sqrt(3)-sqrt(2))^(4)").unwrap();
        assert!(matches!(e, Expr::Mul(ref v) if v.len() == 2));
        assert_eq!(parse(&e.to_string()).unwrap(), e);
    }
}

//! Precision management and the arbitrary-precision real carrier.
//!
//! Every quantity in the crate is a [`BigReal`] computed at the binary
//! precision of a [`PrecisionContext`]. A context is built from the number of
//! decimal digits the caller wants to trust; a fixed number of guard digits is
//! added on top so that the deepest composite expressions (degree-6
//! polynomials in eta quotients, nested radicals) still deliver the requested
//! digits.
//!
//! Fractional powers are always principal positive real roots. Nothing in the
//! crate needs a complex branch.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::qseries::Nome;

/// Smallest accepted number of decimal digits.
pub const MIN_DIGITS: u32 = 10;
/// Internal slack added to every requested precision.
pub const DEFAULT_GUARD_DIGITS: u32 = 15;

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("allocate constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Requested decimal digits plus the binary working precision derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    decimal_digits: u32,
    guard_digits: u32,
    working_precision: usize,
}

/// Builds a context for `decimal_digits` trusted digits with the default guard.
pub fn make_context(decimal_digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::with_guard(decimal_digits, DEFAULT_GUARD_DIGITS)
}

impl PrecisionContext {
    pub fn new(decimal_digits: u32) -> Result<Self> {
        make_context(decimal_digits)
    }

    pub fn with_guard(decimal_digits: u32, guard_digits: u32) -> Result<Self> {
        if decimal_digits < MIN_DIGITS {
            return Err(Error::PrecisionTooLow {
                digits: decimal_digits,
                min: MIN_DIGITS,
            });
        }
        let guard_digits = guard_digits.max(1);
        let total = f64::from(decimal_digits + guard_digits);
        Ok(Self {
            decimal_digits,
            guard_digits,
            working_precision: (total * LOG2_10).ceil() as usize,
        })
    }

    pub fn decimal_digits(&self) -> u32 {
        self.decimal_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Binary digits used for every arithmetic operation.
    pub fn working_precision(&self) -> usize {
        self.working_precision
    }

    /// The same context with `extra` more requested digits.
    pub fn escalated(&self, extra: u32) -> Self {
        Self::with_guard(self.decimal_digits + extra, self.guard_digits)
            .expect("escalation only increases the digit count")
    }

    /// Number of bits below which a discarded series tail must fall:
    /// `10^-(decimal_digits + guard_digits/2)` expressed in base 2.
    pub fn tail_bits(&self) -> i64 {
        let digits = f64::from(self.decimal_digits) + f64::from(self.guard_digits) / 2.0;
        (digits * LOG2_10).ceil() as i64 + 1
    }

    /// The tail target `10^-(decimal_digits + guard_digits/2)` as a real.
    pub fn tail_target(&self) -> BigReal {
        let half_guard = Rational64::new(i64::from(self.guard_digits), 2);
        let exponent = -(Rational64::from_integer(i64::from(self.decimal_digits)) + half_guard);
        BigReal::from_u64(10, self).pow_rational_unchecked(exponent)
    }

    /// `10^-(decimal_digits - loss)`: the usual acceptance threshold after
    /// allowing `loss` digits of cancellation.
    pub fn tolerance(&self, loss: u32) -> BigReal {
        let exp = i64::from(self.decimal_digits) - i64::from(loss);
        BigReal::pow10(-exp, self)
    }
}

/// An arbitrary-precision real number.
///
/// The value carries its own binary precision; binary operations run at the
/// larger precision of the two operands.
#[derive(Clone)]
pub struct BigReal(BigFloat);

impl BigReal {
    fn wrap(v: BigFloat) -> Self {
        BigReal(v)
    }

    /// Binary precision carried by this value.
    pub fn precision_bits(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(64)
    }

    fn joint(&self, other: &Self) -> usize {
        self.precision_bits().max(other.precision_bits())
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::from_u64(0, ctx)
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::from_u64(1, ctx)
    }

    pub fn from_u64(v: u64, ctx: &PrecisionContext) -> Self {
        Self::wrap(BigFloat::from_u64(v, ctx.working_precision()))
    }

    pub fn from_i64(v: i64, ctx: &PrecisionContext) -> Self {
        Self::wrap(BigFloat::from_i64(v, ctx.working_precision()))
    }

    /// Nearest value to a (small) rational `p/q`.
    pub fn from_ratio(r: &Rational64, ctx: &PrecisionContext) -> Self {
        Self::from_i64(*r.numer(), ctx) / Self::from_i64(*r.denom(), ctx)
    }

    /// Converts an arbitrary-size integer, rounding to `bits` of precision.
    pub fn from_bigint(n: &BigInt, bits: usize) -> Self {
        let (sign, words) = n.to_u64_digits();
        if words.is_empty() {
            return Self::wrap(BigFloat::from_u64(0, bits));
        }
        let sign = if sign == BigSign::Minus {
            Sign::Neg
        } else {
            Sign::Pos
        };
        let exact = BigFloat::from_words(&words, sign, (words.len() * 64) as i32);
        let zero = BigFloat::from_u64(0, bits);
        Self::wrap(exact.add(&zero, bits, RM))
    }

    pub fn from_big_rational(r: &BigRational, ctx: &PrecisionContext) -> Self {
        let bits = ctx.working_precision();
        let num = Self::from_bigint(r.numer(), bits + 64);
        let den = Self::from_bigint(r.denom(), bits + 64);
        Self::wrap(num.0.div(&den.0, bits, RM))
    }

    /// Parses a plain decimal literal (`0.1`, `-3`, `2.5e-3`) exactly and
    /// rounds once to the working precision.
    pub fn parse_decimal(text: &str, ctx: &PrecisionContext) -> Result<Self> {
        let r = parse_decimal_rational(text).ok_or_else(|| Error::Syntax {
            offset: 0,
            message: format!("`{text}` is not a decimal number"),
        })?;
        Ok(Self::from_big_rational(&r, ctx))
    }

    /// `10^k`.
    pub fn pow10(k: i64, ctx: &PrecisionContext) -> Self {
        Self::from_u64(10, ctx).powi(k)
    }

    /// π at the working precision.
    pub fn pi(ctx: &PrecisionContext) -> Self {
        let p = ctx.working_precision();
        Self::wrap(with_consts(|cc| cc.pi(p, RM)))
    }

    pub fn exp(&self) -> Self {
        let p = self.precision_bits();
        Self::wrap(with_consts(|cc| self.0.exp(p, RM, cc)))
    }

    /// Natural logarithm; NaN for non-positive input.
    pub fn ln(&self) -> Self {
        let p = self.precision_bits();
        Self::wrap(with_consts(|cc| self.0.ln(p, RM, cc)))
    }

    /// Square root; NaN for negative input.
    pub fn sqrt(&self) -> Self {
        Self::wrap(self.0.sqrt(self.precision_bits(), RM))
    }

    pub fn recip(&self) -> Self {
        Self::wrap(self.0.reciprocal(self.precision_bits(), RM))
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.0.abs())
    }

    /// Integer power by repeated squaring; negative exponents invert.
    pub fn powi(&self, n: i64) -> Self {
        let p = self.precision_bits();
        let mag = self.0.powi(n.unsigned_abs() as usize, p + 16, RM);
        let mag = Self::wrap(mag).rounded_to(p);
        if n < 0 {
            mag.recip()
        } else {
            mag
        }
    }

    fn rounded_to(&self, bits: usize) -> Self {
        let zero = BigFloat::from_u64(0, bits);
        Self::wrap(self.0.add(&zero, bits, RM))
    }

    /// Rounds (or widens) this value to the precision of `ctx`.
    pub fn with_context(&self, ctx: &PrecisionContext) -> Self {
        self.rounded_to(ctx.working_precision())
    }

    /// `x^r` for `x > 0`, principal positive root.
    pub fn pow_rational(&self, r: Rational64) -> Result<Self> {
        if !self.is_positive() {
            return Err(Error::NonPositive { what: "pow_rational" });
        }
        Ok(self.pow_rational_unchecked(r))
    }

    pub(crate) fn pow_rational_unchecked(&self, r: Rational64) -> Self {
        let (num, den) = (*r.numer(), *r.denom());
        match den {
            1 => self.powi(num),
            2 => self.sqrt().powi(num),
            4 => self.sqrt().sqrt().powi(num),
            8 => self.sqrt().sqrt().sqrt().powi(num),
            _ => {
                let p = self.precision_bits();
                let wide = self.rounded_to(p + 32);
                let scale = BigReal::wrap(BigFloat::from_i64(num, p + 32))
                    / BigReal::wrap(BigFloat::from_i64(den, p + 32));
                (wide.ln() * scale).exp().rounded_to(p)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.is_finite() && !self.0.is_zero() && self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.is_finite() && !self.0.is_zero() && self.0.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Approximate `log2 |x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        match self.0.as_raw_parts() {
            Some((words, _, _, e, _)) if !self.0.is_zero() => {
                let top = *words.last().expect("non-empty mantissa") as f64;
                top.log2() + f64::from(e) - 64.0
            }
            _ => f64::NEG_INFINITY,
        }
    }

    /// Approximate `log10 |x|`; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        self.log2_abs() / LOG2_10
    }

    /// Nearest `f64` (zero when the value underflows).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() || !self.is_finite() {
            return if self.0.is_nan() { f64::NAN } else { 0.0 };
        }
        let l = self.log2_abs();
        let mag = 2f64.powf(l);
        if self.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// Exact value as `mantissa * 2^shift`.
    fn to_scaled_integer(&self) -> Option<(BigInt, i64)> {
        let (words, _, sign, e, _) = self.0.as_raw_parts()?;
        let mut m = BigUint::zero();
        for w in words.iter().rev() {
            m = (m << 64u32) + BigUint::from(*w);
        }
        let shift = i64::from(e) - 64 * words.len() as i64;
        let sign = if sign == Sign::Neg {
            BigSign::Minus
        } else {
            BigSign::Plus
        };
        Some((BigInt::from_biguint(sign, m), shift))
    }

    /// Decimal rendering with `significant` significant digits, rounded to
    /// nearest. Values in `[1e-5, 1e21)` are written positionally, the rest in
    /// `d.ddd…e±k` form.
    pub fn to_decimal_string(&self, significant: usize) -> String {
        let significant = significant.max(1);
        if self.0.is_nan() {
            return "NaN".into();
        }
        if self.0.is_inf() {
            return if self.0.is_negative() { "-inf" } else { "inf" }.into();
        }
        let Some((m, shift)) = self.to_scaled_integer() else {
            return "0".into();
        };
        if m.is_zero() {
            return "0".into();
        }
        let negative = m.is_negative();
        let m = m.abs();
        let mut k = self.log10_abs().floor() as i64;
        let digits = loop {
            let d = scaled_round(&m, shift, significant as i64 - 1 - k);
            let text = d.to_string();
            if text.len() > significant {
                k += 1;
                continue;
            }
            if text.len() < significant {
                k -= 1;
                continue;
            }
            break text;
        };
        let body = if (-5..21).contains(&k) {
            if k >= 0 {
                let int_len = (k + 1) as usize;
                if int_len >= digits.len() {
                    format!("{}{}", digits, "0".repeat(int_len - digits.len()))
                } else {
                    format!("{}.{}", &digits[..int_len], &digits[int_len..])
                }
            } else {
                format!("0.{}{}", "0".repeat((-k - 1) as usize), digits)
            }
        } else if digits.len() == 1 {
            format!("{digits}e{k}")
        } else {
            format!("{}.{}e{}", &digits[..1], &digits[1..], k)
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

/// `round(m * 2^shift * 10^t)` for non-negative `m`.
fn scaled_round(m: &BigInt, shift: i64, t: i64) -> BigInt {
    let mut num = m.clone();
    let mut den = BigInt::one();
    if shift >= 0 {
        num <<= shift as usize;
    } else {
        den <<= (-shift) as usize;
    }
    let ten = BigInt::from(10u32);
    if t >= 0 {
        num *= num_traits::pow(ten, t as usize);
    } else {
        den *= num_traits::pow(ten, (-t) as usize);
    }
    let (q, r) = num.div_rem(&den);
    if r * 2 >= den {
        q + 1
    } else {
        q
    }
}

/// Exact rational value of a decimal literal such as `-12.5e-3`.
pub(crate) fn parse_decimal_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().ok()?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    Some(r)
}

/// Converts a small rational to the `i64` pair form used for exponents.
pub(crate) fn big_to_rational64(r: &BigRational) -> Option<Rational64> {
    Some(Rational64::new(r.numer().to_i64()?, r.denom().to_i64()?))
}

/// `x^r` for `x > 0` as a free function.
pub fn pow_rational(x: &BigReal, r: Rational64, ctx: &PrecisionContext) -> Result<BigReal> {
    x.with_context(ctx).pow_rational(r)
}

/// The nome `q = e^{-π√n}` for a positive rational `n`.
pub fn nome_from_n(n: Rational64, ctx: &PrecisionContext) -> Result<Nome> {
    if *n.numer() <= 0 {
        return Err(Error::NonPositive { what: "nome_from_n" });
    }
    let root = BigReal::from_ratio(&n, ctx).sqrt();
    let q = (-(BigReal::pi(ctx) * root)).exp();
    Nome::new(q, ctx)
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigReal({})", self.to_decimal_string(20))
    }
}

impl fmt::Display for BigReal {
    /// Uses the formatter precision as the number of significant digits
    /// (default 30).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal_string(f.precision().unwrap_or(30)))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let p = self.joint(rhs);
                BigReal::wrap(self.0.$method(&rhs.0, p, RM))
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.0.neg())
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.0.clone().neg())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        make_context(d).unwrap()
    }

    #[test]
    fn context_bits_follow_digit_formula() {
        assert!(ctx(50).working_precision() >= 216);
        assert!(ctx(10).working_precision() >= 84);
        assert_eq!(
            make_context(9),
            Err(Error::PrecisionTooLow { digits: 9, min: 10 })
        );
    }

    #[test]
    fn decimal_rendering() {
        let c = ctx(30);
        let half = BigReal::from_ratio(&Rational64::new(1, 2), &c);
        assert_eq!(half.to_decimal_string(5), "0.50000");
        let third = BigReal::from_ratio(&Rational64::new(1, 3), &c);
        assert_eq!(third.to_decimal_string(6), "0.333333");
        let big = BigReal::from_u64(123456, &c);
        assert_eq!(big.to_decimal_string(3), "123000");
        assert_eq!(big.to_decimal_string(8), "123456.00");
        let tiny = BigReal::pow10(-12, &c) * BigReal::from_u64(25, &c);
        assert_eq!(tiny.to_decimal_string(3), "2.50e-11");
        assert_eq!((-&third).to_decimal_string(2), "-0.33");
        let nine = BigReal::from_ratio(&Rational64::new(999_999, 1_000_000), &c);
        assert_eq!(nine.to_decimal_string(3), "1.00");
    }

    #[test]
    fn bigint_and_decimal_parsing_are_exact() {
        let c = ctx(40);
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let x = BigReal::from_bigint(&n, c.working_precision());
        assert_eq!(x.to_decimal_string(30), "1.23456789012345678901234567890e29");
        let tenth = BigReal::parse_decimal("0.1", &c).unwrap();
        let ten = BigReal::from_u64(10, &c);
        let err = (tenth * ten - BigReal::one(&c)).abs();
        assert!(err < c.tolerance(0));
        assert!(BigReal::parse_decimal("1.2.3", &c).is_err());
        assert!(BigReal::parse_decimal("", &c).is_err());
        let e = BigReal::parse_decimal("-2.5e-3", &c).unwrap();
        assert_eq!(e.to_decimal_string(2), "-0.0025");
    }

    #[test]
    fn pow_rational_identities() {
        let c = ctx(40);
        let x = BigReal::from_ratio(&Rational64::new(7, 3), &c);
        assert_eq!(x.pow_rational(Rational64::from_integer(0)).unwrap(), BigReal::one(&c));
        let one = x.pow_rational(Rational64::from_integer(1)).unwrap();
        assert!((one - &x).abs() < c.tolerance(0));
        assert!(BigReal::zero(&c).pow_rational(Rational64::new(1, 2)).is_err());
        assert!(BigReal::from_i64(-2, &c).pow_rational(Rational64::new(1, 3)).is_err());
    }

    #[test]
    fn nome_rejects_non_positive_n() {
        let c = ctx(20);
        assert!(nome_from_n(Rational64::from_integer(0), &c).is_err());
        assert!(nome_from_n(Rational64::new(-1, 2), &c).is_err());
    }
}

use num_rational::Rational64;

use crate::numerics::{BigReal, PrecisionContext};
use crate::qseries::{f_neg, f_pos, Nome};

/// Whether a factor is `f(-q^c)` or `f(q^c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaSign {
    Minus,
    Plus,
}

/// `f(±q^scale)^power`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EtaFactor {
    pub scale: u32,
    pub power: i32,
    pub sign: ThetaSign,
}

/// `q^{q_exponent} Π f(±q^{scale})^{power}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaQuotient {
    pub q_exponent: Rational64,
    pub factors: Vec<EtaFactor>,
}

impl EtaQuotient {
    /// Builds a quotient of `f(-q^c)` factors from `(scale, power)` pairs.
    pub fn minus(q_exponent: Rational64, factors: &[(u32, i32)]) -> Self {
        Self {
            q_exponent,
            factors: factors
                .iter()
                .map(|&(scale, power)| EtaFactor {
                    scale,
                    power,
                    sign: ThetaSign::Minus,
                })
                .collect(),
        }
    }

    /// The empty quotient, equal to 1.
    pub fn unit() -> Self {
        Self::minus(Rational64::from_integer(0), &[])
    }

    /// Product of two quotients, merging equal factors.
    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for f in &other.factors {
            match factors
                .iter_mut()
                .find(|g| g.scale == f.scale && g.sign == f.sign)
            {
                Some(g) => g.power += f.power,
                None => factors.push(*f),
            }
        }
        factors.retain(|f| f.power != 0);
        Self {
            q_exponent: self.q_exponent + other.q_exponent,
            factors,
        }
    }

    /// Reciprocal quotient.
    pub fn inv(&self) -> Self {
        Self {
            q_exponent: -self.q_exponent,
            factors: self
                .factors
                .iter()
                .map(|f| EtaFactor { power: -f.power, ..*f })
                .collect(),
        }
    }

    pub fn eval(&self, q: &Nome, ctx: &PrecisionContext) -> BigReal {
        eval_eta_quotient(self, q, ctx)
    }
}

/// `q^{q_exponent} Π f(±q^{scale})^{power}`, positive for every valid nome.
pub fn eval_eta_quotient(e: &EtaQuotient, q: &Nome, ctx: &PrecisionContext) -> BigReal {
    let mut value = q.q().with_context(ctx).pow_rational_unchecked(e.q_exponent);
    for f in &e.factors {
        let qc = q.pow(f.scale);
        let theta = match f.sign {
            ThetaSign::Minus => f_neg(&qc, ctx),
            ThetaSign::Plus => f_pos(&qc, ctx),
        };
        value = value * theta.powi(i64::from(f.power));
    }
    value
}

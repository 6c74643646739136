//! Complete elliptic integrals, `₂F₁(1/2,1/2;1;z)` and singular moduli.
//!
//! The squared modulus `α = k²` of a nome is computed from eta quotients,
//! `α = (f(q) / (√2 q^{1/8} f(-q⁴)))^{-8}` and `1 - α = (f(-q)/f(q))^8`, and
//! every evaluation is cross-checked against the classical theta quotients
//! `α = 16q ψ⁴(q²)/φ⁴(q)` and `1 - α = φ⁴(-q)/φ⁴(q)`. Both halves are kept
//! so that moduli very close to 0 or 1 keep full relative accuracy.

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::numerics::{nome_from_n, BigReal, PrecisionContext};
use crate::qseries::{f_neg, phi, phi_at_neg, psi, Nome};

/// Digits the two independent `α` routes may disagree by before the
/// evaluation is rejected.
const ROUTE_SLACK_DIGITS: u32 = 5;
const MAX_TERMS: usize = 400_000;

/// A squared modulus `α = k²` together with its complement `1 - α`.
#[derive(Debug, Clone)]
pub struct Modulus {
    alpha: BigReal,
    complement: BigReal,
    n_label: Option<Rational64>,
}

impl Modulus {
    /// Wraps a value `0 < α < 1`; the complement is formed by subtraction.
    pub fn new(alpha: BigReal) -> Result<Self> {
        let one = BigReal::from_bigint(&1.into(), alpha.precision_bits());
        let complement = &one - &alpha;
        Self::from_parts(alpha, complement, None)
    }

    pub(crate) fn from_parts(
        alpha: BigReal,
        complement: BigReal,
        n_label: Option<Rational64>,
    ) -> Result<Self> {
        if !alpha.is_positive() || !complement.is_positive() {
            return Err(Error::Domain {
                what: "modulus",
                value: alpha.to_decimal_string(12),
                domain: "0 < alpha < 1",
            });
        }
        Ok(Self {
            alpha,
            complement,
            n_label,
        })
    }

    pub fn alpha(&self) -> &BigReal {
        &self.alpha
    }

    /// `1 - α`, computed without cancellation.
    pub fn complement(&self) -> &BigReal {
        &self.complement
    }

    /// The `n` of `α_n`, when this modulus is a singular modulus.
    pub fn n_label(&self) -> Option<Rational64> {
        self.n_label
    }

    /// The modulus `k = √α`.
    pub fn k(&self) -> BigReal {
        self.alpha.sqrt()
    }

    /// `K'/K = ₂F₁(1-α)/₂F₁(α)`, where `₂F₁ = ₂F₁(1/2,1/2;1;·)`.
    pub fn period_ratio(&self, ctx: &PrecisionContext) -> BigReal {
        let direct = hyp2f1_split(&self.alpha, &self.complement, ctx);
        let complementary = hyp2f1_split(&self.complement, &self.alpha, ctx);
        complementary / direct
    }
}

/// `₂F₁(1/2,1/2;1;z)` given both `z` and `1 - z`; picks whichever series
/// converges fastest.
fn hyp2f1_split(z: &BigReal, one_minus_z: &BigReal, ctx: &PrecisionContext) -> BigReal {
    if z <= one_minus_z {
        hyp2f1_direct(z, ctx)
    } else {
        hyp2f1_near_one(one_minus_z, ctx)
    }
}

fn hyp2f1_direct(z: &BigReal, ctx: &PrecisionContext) -> BigReal {
    let z = z.with_context(ctx);
    let one = BigReal::one(ctx);
    let tail_scale = &one / (&one - &z);
    let mut sum = BigReal::zero(ctx);
    let mut term = one.clone();
    for n in 0..MAX_TERMS {
        // tail after `term` ≤ term/(1-z): the coefficient ratio is below 1
        if term.is_zero() || (&term * &tail_scale).log2_abs() < -(ctx.tail_bits() as f64) {
            return sum;
        }
        sum = sum + &term;
        let r = BigReal::from_ratio(&Rational64::new(2 * n as i64 + 1, 2 * n as i64 + 2), ctx);
        term = &term * &r * &r * &z;
    }
    unreachable!("z ≤ 1/2 converges well within the term limit")
}

/// `₂F₁(1/2,1/2;1;1-β)` for small `β` via the logarithmic expansion
/// `(1/π) Σ c_n βⁿ [ln(16/β) - 4(H_{2n} - H_n)]`, `c_n = ((1/2)_n / n!)²`.
fn hyp2f1_near_one(beta: &BigReal, ctx: &PrecisionContext) -> BigReal {
    let beta = beta.with_context(ctx);
    let one = BigReal::one(ctx);
    let log_term = (BigReal::from_u64(16, ctx) / &beta).ln();
    let four = BigReal::from_u64(4, ctx);
    let tail_scale = &log_term / (&one - &beta);
    let mut sum = BigReal::zero(ctx);
    let mut coeff = one.clone();
    let mut harmonic_gap = BigReal::zero(ctx);
    for n in 0..MAX_TERMS {
        if coeff.is_zero() || (&coeff * &tail_scale).log2_abs() < -(ctx.tail_bits() as f64) {
            return sum / BigReal::pi(ctx);
        }
        sum = sum + &coeff * (&log_term - &four * &harmonic_gap);
        let n = n as i64;
        let r = BigReal::from_ratio(&Rational64::new(2 * n + 1, 2 * n + 2), ctx);
        coeff = &coeff * &r * &r * &beta;
        // H_{2n+2} - H_{n+1} = (H_{2n} - H_n) + 1/(2n+1) - 1/(2n+2)
        harmonic_gap = harmonic_gap
            + BigReal::from_ratio(&Rational64::new(1, (2 * n + 1) * (2 * n + 2)), ctx);
    }
    unreachable!("β ≤ 1/2 converges well within the term limit")
}

/// `₂F₁(1/2,1/2;1;z)` for `0 ≤ z < 1`.
pub fn hyp2f1_half(z: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let one = BigReal::one(ctx);
    if z.is_negative() || *z >= one || !z.is_finite() {
        return Err(Error::Domain {
            what: "hyp2f1_half",
            value: z.to_decimal_string(12),
            domain: "0 <= z < 1",
        });
    }
    let complement = &one - z;
    Ok(hyp2f1_split(z, &complement, ctx))
}

/// `K(k) = (π/2) ₂F₁(1/2,1/2;1;k²)` for `0 < k < 1`.
pub fn ellip_k(k: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let one = BigReal::one(ctx);
    if !k.is_positive() || *k >= one {
        return Err(Error::Domain {
            what: "ellip_k",
            value: k.to_decimal_string(12),
            domain: "0 < k < 1",
        });
    }
    let half_pi = BigReal::pi(ctx) / BigReal::from_u64(2, ctx);
    Ok(half_pi * hyp2f1_half(&(k * k), ctx)?)
}

fn relative_gap(a: &BigReal, b: &BigReal) -> BigReal {
    (a - b).abs() / b.abs()
}

/// `α(q)` by the eta-quotient route, verified against the theta route.
pub fn alpha_from_nome(q: &Nome, ctx: &PrecisionContext) -> Result<Modulus> {
    let (eta_alpha, eta_complement) = alpha_eta_route(q, ctx);
    let (theta_alpha, theta_complement) = alpha_theta_route(q, ctx);
    let limit = ctx.tolerance(ROUTE_SLACK_DIGITS);
    let gap = relative_gap(&eta_alpha, &theta_alpha).max(&relative_gap(&eta_complement, &theta_complement));
    // negated so that a NaN gap is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(gap < limit) {
        return Err(Error::InternalInconsistency {
            what: "alpha_from_nome",
            residual: gap.to_decimal_string(6),
        });
    }
    Modulus::from_parts(eta_alpha, eta_complement, None)
}

/// `(α, 1-α)` from `f(q)/(√2 q^{1/8} f(-q⁴))` and `f(-q)/f(q)`.
pub(crate) fn alpha_eta_route(q: &Nome, ctx: &PrecisionContext) -> (BigReal, BigReal) {
    let f1 = f_neg(q, ctx);
    let f2 = f_neg(&q.pow(2), ctx);
    let f4 = f_neg(&q.pow(4), ctx);
    let f_plus = f2.powi(3) / (&f1 * &f4);
    let alpha = BigReal::from_u64(16, ctx) * q.q().with_context(ctx) * (&f4 / &f_plus).powi(8);
    let complement = (&f1 / &f_plus).powi(8);
    (alpha, complement)
}

/// `(α, 1-α)` from `16q ψ⁴(q²)/φ⁴(q)` and `φ⁴(-q)/φ⁴(q)`.
pub(crate) fn alpha_theta_route(q: &Nome, ctx: &PrecisionContext) -> (BigReal, BigReal) {
    let p = phi(q, ctx);
    let alpha =
        BigReal::from_u64(16, ctx) * q.q().with_context(ctx) * (psi(&q.pow(2), ctx) / &p).powi(4);
    let complement = (phi_at_neg(q, ctx) / &p).powi(4);
    (alpha, complement)
}

/// The singular modulus `α_n = α(e^{-π√n})`.
pub fn singular_alpha(n: Rational64, ctx: &PrecisionContext) -> Result<Modulus> {
    let q = nome_from_n(n, ctx)?;
    let mut m = alpha_from_nome(&q, ctx)?;
    m.n_label = Some(n);
    Ok(m)
}

/// `|ratio(β)/ratio(α) - n|` with `α = α(q)`, `β = α(qⁿ)` and
/// `ratio(x) = ₂F₁(1-x)/₂F₁(x)`; small when `β` has degree `n` over `α`.
pub fn verify_degree(q: &Nome, n: u32, ctx: &PrecisionContext) -> Result<BigReal> {
    if n == 0 {
        return Err(Error::NonPositive { what: "verify_degree" });
    }
    let alpha = alpha_from_nome(q, ctx)?;
    let beta = alpha_from_nome(&q.pow(n), ctx)?;
    let ratio = beta.period_ratio(ctx) / alpha.period_ratio(ctx);
    Ok((ratio - BigReal::from_u64(u64::from(n), ctx)).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    #[test]
    fn hyp2f1_domain() {
        let c = make_context(20).unwrap();
        assert!(hyp2f1_half(&BigReal::one(&c), &c).is_err());
        assert!(hyp2f1_half(&BigReal::from_i64(-1, &c), &c).is_err());
        assert_eq!(hyp2f1_half(&BigReal::zero(&c), &c).unwrap(), BigReal::one(&c));
        assert!(ellip_k(&BigReal::zero(&c), &c).is_err());
        assert!(ellip_k(&BigReal::one(&c), &c).is_err());
    }

    #[test]
    fn alpha_one_is_half() {
        let c = make_context(40).unwrap();
        let m = singular_alpha(Rational64::from_integer(1), &c).unwrap();
        let half = BigReal::from_ratio(&Rational64::new(1, 2), &c);
        assert!((m.alpha() - &half).abs() < c.tolerance(0));
        assert!((m.complement() - &half).abs() < c.tolerance(0));
        assert_eq!(m.n_label(), Some(Rational64::from_integer(1)));
    }

    #[test]
    fn modulus_rejects_out_of_range() {
        let c = make_context(20).unwrap();
        assert!(Modulus::new(BigReal::zero(&c)).is_err());
        assert!(Modulus::new(BigReal::one(&c)).is_err());
        assert!(Modulus::new(BigReal::from_ratio(&Rational64::new(1, 3), &c)).is_ok());
    }

    #[test]
    fn degree_one_residual_vanishes() {
        let c = make_context(40).unwrap();
        let q = nome_from_n(Rational64::from_integer(1), &c).unwrap();
        assert!(verify_degree(&q, 1, &c).unwrap() < c.tolerance(10));
        assert!(verify_degree(&q, 0, &c).is_err());
    }

    /// `K(k) = π / (2 AGM(1, √(1-k²)))`, independent of every series here.
    fn agm_k(k: &BigReal, c: &PrecisionContext) -> BigReal {
        let one = BigReal::one(c);
        let two = BigReal::from_u64(2, c);
        let mut a = one.clone();
        let mut b = (&one - k * k).sqrt();
        while (&a - &b).abs() > c.tolerance(0) * BigReal::pow10(-5, c) {
            let next = (&a + &b) / &two;
            b = (&a * &b).sqrt();
            a = next;
        }
        BigReal::pi(c) / (two * a)
    }

    #[test]
    fn ellip_k_matches_agm() {
        let c = make_context(50).unwrap();
        for (p, q) in [(3, 10), (1, 2), (9, 10), (999, 1000)] {
            let k = BigReal::from_ratio(&Rational64::new(p, q), &c);
            let ours = ellip_k(&k, &c).unwrap();
            let oracle = agm_k(&k, &c);
            assert!((&ours - &oracle).abs() / &oracle < c.tolerance(3), "k = {p}/{q}");
        }
        // z = 1/2 exercises both branches of the split
        let z = BigReal::from_ratio(&Rational64::new(1, 2), &c);
        let k = z.sqrt();
        let expected = agm_k(&k, &c) * BigReal::from_u64(2, &c) / BigReal::pi(&c);
        assert!((hyp2f1_half(&z, &c).unwrap() - expected).abs() < c.tolerance(3));
    }

    #[test]
    fn k_is_half_pi_phi_squared() {
        let c = make_context(50).unwrap();
        for n in [Rational64::new(1, 4), Rational64::from_integer(2), Rational64::from_integer(9)] {
            let q = nome_from_n(n, &c).unwrap();
            let m = alpha_from_nome(&q, &c).unwrap();
            let half_pi = BigReal::pi(&c) / BigReal::from_u64(2, &c);
            let from_theta = half_pi * phi(&q, &c).powi(2);
            let k = ellip_k(&m.k(), &c).unwrap();
            assert!((&k - &from_theta).abs() / &k < c.tolerance(5), "n = {n}");
            let ratio = m.period_ratio(&c);
            let expected = BigReal::from_ratio(&n, &c).sqrt();
            assert!((ratio - expected).abs() < c.tolerance(5), "n = {n}");
        }
    }

    #[test]
    fn alpha_four_is_exact() {
        let c = make_context(50).unwrap();
        let m = singular_alpha(Rational64::from_integer(4), &c).unwrap();
        let two = BigReal::from_u64(2, &c);
        let exact = BigReal::from_u64(17, &c) - BigReal::from_u64(12, &c) * two.sqrt();
        assert!((m.alpha() - &exact).abs() / &exact < c.tolerance(3));
    }

    #[test]
    fn complementary_nomes_swap_moduli() {
        let c = make_context(40).unwrap();
        for n in [4, 9] {
            let m = singular_alpha(Rational64::from_integer(n), &c).unwrap();
            let dual = singular_alpha(Rational64::new(1, n), &c).unwrap();
            assert!((m.alpha() - dual.complement()).abs() / m.alpha() < c.tolerance(5));
            assert!((m.complement() - dual.alpha()).abs() < c.tolerance(5));
        }
    }

    #[test]
    fn singular_moduli_decrease_with_n() {
        let c = make_context(30).unwrap();
        let ns = [
            Rational64::new(1, 4),
            Rational64::new(4, 9),
            Rational64::from_integer(1),
            Rational64::from_integer(4),
            Rational64::from_integer(8),
            Rational64::from_integer(36),
            Rational64::from_integer(72),
        ];
        let alphas: Vec<BigReal> = ns
            .iter()
            .map(|&n| singular_alpha(n, &c).unwrap().alpha().clone())
            .collect();
        assert!(alphas.windows(2).all(|w| w[1] < w[0]));
    }
}

//! Small-`q` behaviour of the polynomial factors behind the mixed modular
//! equations.
//!
//! Each equation arises as one factor of a product `F₁ F₂ ⋯ = 0` in `P` and
//! `Q`. Near `q = 0` every monomial `c Pⁱ Qʲ` behaves like `c q^{ai+bj}`, where
//! `P ~ q^a` and `Q ~ q^b` with leading coefficient 1. The retained factor is
//! the one whose lowest-order coefficients cancel; it is identically zero, so
//! `|F|/q^e` sits at the precision floor. A discarded factor keeps a non-zero
//! leading coefficient `c`, so `|F|/q^e → |c|` and `F` is bounded away from 0
//! relative to `q^e`.

use std::collections::BTreeMap;

use num_rational::Rational64;

use super::registry::theorem_pq;
use crate::error::{Error, Result};
use crate::numerics::{BigReal, PrecisionContext};
use crate::qseries::Nome;

/// Largest relative distance of `|F|/q^e` from `|c|` for a discarded factor;
/// keeps the factor within a factor of two of its leading term.
const LEADING_TOLERANCE: (i64, i64) = (1, 2);

/// Laurent polynomial in `P`, `Q`: `(i, j) ↦ coefficient of Pⁱ Qʲ`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Laurent(BTreeMap<(i32, i32), i128>);

impl Laurent {
    pub fn from_terms(terms: &[(i128, i32, i32)]) -> Self {
        let mut out = Laurent::default();
        for &(c, i, j) in terms {
            out.add_term(c, i, j);
        }
        out
    }

    fn add_term(&mut self, c: i128, i: i32, j: i32) {
        let slot = self.0.entry((i, j)).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.0.remove(&(i, j));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, j), &c) in &other.0 {
            out.add_term(c, i, j);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Laurent::default();
        for (&(i1, j1), &c1) in &self.0 {
            for (&(i2, j2), &c2) in &other.0 {
                out.add_term(c1 * c2, i1 + i2, j1 + j2);
            }
        }
        out
    }

    pub fn scale(&self, k: i128) -> Self {
        Laurent(self.0.iter().map(|(&e, &c)| (e, c * k)).collect())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Laurent::from_terms(&[(1, 0, 0)]), |acc, _| acc.mul(self))
    }

    /// Lowest q-order `e` and the total coefficient at that order, given
    /// `P ~ q^a`, `Q ~ q^b`.
    pub fn leading(&self, a: Rational64, b: Rational64) -> (Rational64, i128) {
        let order = |i: i32, j: i32| a * i64::from(i) + b * i64::from(j);
        let e = self
            .0
            .keys()
            .map(|&(i, j)| order(i, j))
            .min()
            .unwrap_or_else(|| Rational64::from_integer(0));
        let c = self
            .0
            .iter()
            .filter(|(&(i, j), _)| order(i, j) == e)
            .map(|(_, &c)| c)
            .sum();
        (e, c)
    }

    /// `(Σ c Pⁱ Qʲ, Σ |c| |Pⁱ Qʲ|)`.
    pub fn eval(&self, p: &BigReal, q: &BigReal, ctx: &PrecisionContext) -> (BigReal, BigReal) {
        let mut value = BigReal::zero(ctx);
        let mut scale = BigReal::zero(ctx);
        for (&(i, j), &c) in &self.0 {
            let mono = p.powi(i64::from(i)) * q.powi(i64::from(j));
            let term = BigReal::from_i64(i64::try_from(c).expect("coefficients fit in i64"), ctx) * mono;
            scale = scale + term.abs();
            value = value + term;
        }
        (value, scale)
    }
}

/// A named factor and whether the corresponding equation retains it.
#[derive(Debug, Clone)]
pub struct Factor {
    pub name: &'static str,
    pub selected: bool,
    pub poly: Laurent,
}

fn factor(name: &'static str, selected: bool, terms: &[(i128, i32, i32)]) -> Factor {
    Factor {
        name,
        selected,
        poly: Laurent::from_terms(terms),
    }
}

/// Factors of the polynomial equation behind theorem `id`.
pub fn theorem_factors(id: &str) -> Result<Vec<Factor>> {
    Ok(match id {
        "T3.1" => vec![
            factor(
                "A(P,Q)",
                false,
                &[
                    (1, 6, 6), (-8, 5, 5), (-64, 3, 5), (-80, 4, 4), (-256, 2, 4),
                    (-64, 5, 3), (-768, 3, 3), (-1024, 1, 3), (-256, 4, 2),
                    (-1280, 2, 2), (-1024, 3, 1), (-2048, 1, 1), (4096, 0, 0),
                ],
            ),
            factor(
                "B(P,Q)",
                true,
                &[
                    (1, 0, 6), (-1, 3, 5), (-2, 1, 5), (-1, 4, 4), (-5, 2, 4),
                    (-1, 5, 3), (-12, 3, 3), (-16, 1, 3), (-5, 4, 2), (-16, 2, 2),
                    (-2, 5, 1), (-16, 3, 1), (1, 6, 0),
                ],
            ),
        ],
        "T3.2" => vec![
            factor(
                "F1",
                true,
                &[
                    (1, 2, 6), (-1, 5, 5), (1, 1, 5), (2, 4, 4), (1, 0, 4), (4, 3, 3),
                    (1, 6, 2), (2, 2, 2), (1, 5, 1), (-1, 1, 1), (1, 4, 0),
                ],
            ),
            factor(
                "F2",
                false,
                &[
                    (1, 2, 6), (1, 5, 5), (-1, 1, 5), (2, 4, 4), (1, 0, 4), (-4, 3, 3),
                    (1, 6, 2), (2, 2, 2), (-1, 5, 1), (1, 1, 1), (1, 4, 0),
                ],
            ),
            factor(
                "F3",
                false,
                &[
                    (1, 4, 6), (-1, 5, 5), (1, 1, 5), (1, 6, 4), (2, 2, 4), (-4, 3, 3),
                    (2, 4, 2), (1, 0, 2), (1, 5, 1), (-1, 1, 1), (1, 2, 0),
                ],
            ),
            factor(
                "F4",
                false,
                &[
                    (1, 4, 6), (1, 5, 5), (-1, 1, 5), (1, 6, 4), (2, 2, 4), (4, 3, 3),
                    (2, 4, 2), (1, 0, 2), (-1, 5, 1), (1, 1, 1), (1, 2, 0),
                ],
            ),
        ],
        "T3.3" => {
            let h = Laurent::from_terms(&[(1, 1, -1), (1, -1, 1)]);
            let one = Laurent::from_terms(&[(1, 0, 0)]);
            let p4q4 = Laurent::from_terms(&[(1, 4, 4)]);
            let p8q8 = Laurent::from_terms(&[(1, 8, 8)]);
            // P⁴Q⁴(h⁶ - 8h⁵ + 4h⁴ + 64h³ - 16h² - 160h - 96) - P⁸Q⁸(h + 1) - 256(h + 1)
            let in_h = [(1, 6), (-8, 5), (4, 4), (64, 3), (-16, 2), (-160, 1), (-96, 0)]
                .iter()
                .fold(Laurent::default(), |acc, &(c, k)| acc.add(&h.pow(k).scale(c)));
            let h1 = h.add(&one);
            let selected = p4q4
                .mul(&in_h)
                .add(&p8q8.mul(&h1).scale(-1))
                .add(&h1.scale(-256));
            vec![
                Factor {
                    name: "h+1",
                    selected: false,
                    poly: h1,
                },
                Factor {
                    name: "G(P,Q,h)",
                    selected: true,
                    poly: selected,
                },
            ]
        }
        "T3.4" => vec![
            factor(
                "F1",
                true,
                &[(1, 0, 6), (-1, 3, 5), (3, 2, 4), (3, 4, 2), (-16, 3, 1), (1, 6, 0)],
            ),
            factor(
                "F2",
                false,
                &[(1, 0, 6), (1, 3, 5), (3, 2, 4), (3, 4, 2), (16, 3, 1), (1, 6, 0)],
            ),
            factor(
                "F3",
                false,
                &[(1, 1, 6), (-16, 0, 5), (3, 3, 4), (3, 5, 2), (-1, 8, 1), (1, 7, 0)],
            ),
            factor(
                "F4",
                false,
                &[(1, 1, 6), (16, 0, 5), (3, 3, 4), (3, 5, 2), (1, 8, 1), (1, 7, 0)],
            ),
        ],
        other => return Err(Error::UnknownIdentity(other.to_string())),
    })
}

/// Leading q-orders `(a, b)` of `P ~ q^a`, `Q ~ q^b`, read off the quotients.
fn pq_orders(id: &str) -> Result<(Rational64, Rational64)> {
    let (p, q) = theorem_pq(id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))?;
    Ok((p.q_exponent, q.q_exponent))
}

/// Small-`q` behaviour of one factor.
#[derive(Debug, Clone)]
pub struct FactorReport {
    pub name: &'static str,
    pub selected: bool,
    /// Lowest q-order `e` among the monomials.
    pub leading_order: Rational64,
    /// Total coefficient of `q^e`; zero means the leading terms cancel.
    pub leading_coefficient: i128,
    /// `|F|/q^e` at `q` and at `q/2`.
    pub scaled: [BigReal; 2],
    /// `|F| / Σ|monomials|` at `q` and at `q/2`.
    pub relative_size: [BigReal; 2],
    pub ok: bool,
}

/// Factor behaviour at `q` and `q/2` for one theorem.
#[derive(Debug, Clone)]
pub struct FactorLimitReport {
    pub theorem: String,
    pub q: BigReal,
    pub factors: Vec<FactorReport>,
    pub pass: bool,
}

/// Confirms that the retained factor of theorem `id` vanishes as `q → 0` while
/// every discarded factor approaches `c q^e` with `c ≠ 0`. Requires `q ≤ 0.01`.
pub fn factor_limit_check(id: &str, q_small: &Nome, ctx: &PrecisionContext) -> Result<FactorLimitReport> {
    let limit = BigReal::from_ratio(&Rational64::new(1, 100), ctx);
    if *q_small.q() > limit {
        return Err(Error::Domain {
            what: "factor_limit_check",
            value: q_small.q().to_decimal_string(12),
            domain: "q <= 0.01",
        });
    }
    let factors = theorem_factors(id)?;
    let (a, b) = pq_orders(id)?;
    let (pe, qe) = theorem_pq(id).expect("checked above");
    let half_q = Nome::new(q_small.q() / BigReal::from_u64(2, ctx), ctx)?;
    let points = [q_small.clone(), half_q];
    let pq: Vec<(BigReal, BigReal, BigReal)> = points
        .iter()
        .map(|q| (pe.eval(q, ctx), qe.eval(q, ctx), q.q().with_context(ctx)))
        .collect();
    let floor = ctx.tolerance(super::verify::THRESHOLD_LOSS);
    let tol = BigReal::from_ratio(&Rational64::new(LEADING_TOLERANCE.0, LEADING_TOLERANCE.1), ctx);
    let mut reports = Vec::new();
    for f in factors {
        let (e, c) = f.poly.leading(a, b);
        let mut scaled = Vec::new();
        let mut relative = Vec::new();
        for (p, qq, qv) in &pq {
            let (value, size) = f.poly.eval(p, qq, ctx);
            scaled.push(value.abs() / qv.pow_rational_unchecked(e));
            relative.push(value.abs() / size);
        }
        let ok = if f.selected {
            c == 0 && relative.iter().all(|r| *r < floor)
        } else {
            let lead = BigReal::from_i64(i64::try_from(c.abs()).unwrap_or(i64::MAX), ctx);
            let gaps: Vec<BigReal> = scaled
                .iter()
                .map(|s| (s / &lead - BigReal::one(ctx)).abs())
                .collect();
            // Bounded away from zero, and closer to `|c|` at `q/2` than at `q`.
            c != 0 && gaps.iter().all(|g| *g < tol) && gaps[1] <= gaps[0]
        };
        reports.push(FactorReport {
            name: f.name,
            selected: f.selected,
            leading_order: e,
            leading_coefficient: c,
            scaled: [scaled[0].clone(), scaled[1].clone()],
            relative_size: [relative[0].clone(), relative[1].clone()],
            ok,
        });
    }
    let pass = reports.iter().all(|r| r.ok) && reports.iter().filter(|r| r.selected).count() == 1;
    Ok(FactorLimitReport {
        theorem: id.to_string(),
        q: q_small.q().clone(),
        factors: reports,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn laurent_arithmetic() {
        let h = Laurent::from_terms(&[(1, 1, -1), (1, -1, 1)]);
        // h² = P²/Q² + 2 + Q²/P²
        assert_eq!(
            h.pow(2),
            Laurent::from_terms(&[(1, 2, -2), (2, 0, 0), (1, -2, 2)])
        );
        assert_eq!(h.add(&h.scale(-1)), Laurent::default());
    }

    #[test]
    fn leading_coefficients_cancel_only_in_selected_factors() {
        for id in ["T3.1", "T3.2", "T3.3", "T3.4"] {
            let (a, b) = pq_orders(id).unwrap();
            for f in theorem_factors(id).unwrap() {
                let (_, c) = f.poly.leading(a, b);
                assert_eq!(c == 0, f.selected, "{id} {}", f.name);
            }
        }
    }

    #[test]
    fn leading_orders() {
        let (a, b) = pq_orders("T3.1").unwrap();
        assert_eq!((a, b), (r(-1, 2), r(-3, 2)));
        let a_poly = &theorem_factors("T3.1").unwrap()[0].poly;
        assert_eq!(a_poly.leading(a, b), (r(-12, 1), 1));
    }

    #[test]
    fn rejects_large_q_and_unknown_theorem() {
        let c = crate::numerics::make_context(30).unwrap();
        let q = Nome::from_decimal("0.05", &c).unwrap();
        assert!(factor_limit_check("T3.1", &q, &c).is_err());
        assert!(theorem_factors("T9.9").is_err());
    }
}

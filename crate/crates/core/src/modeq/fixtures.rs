//! Plain-text verification fixtures, one case per line:
//!
//! ```text
//! # <identity-id> <q> <digits> <threshold-exponent>
//! T3.1 0.1 60 50
//! D3a exp(-pi*sqrt(4/9)) 50 40
//! ```
//!
//! A case passes when its relative residual is below `10^-threshold`.

use super::registry::lookup;
use super::verify::{verify_identity_with, ResidualReport};
use crate::error::{Error, Result};
use crate::numerics::{make_context, BigReal, MIN_DIGITS};
use crate::qseries::NomeSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureCase {
    pub line: usize,
    pub id: String,
    pub q: NomeSpec,
    pub digits: u32,
    pub threshold_exponent: u32,
}

/// Parses fixture text; `#` starts a comment.
pub fn parse_fixtures(text: &str) -> Result<Vec<FixtureCase>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fail = |message: String| Error::Fixture { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [id, q, digits, threshold] = fields[..] else {
            return Err(fail(format!(
                "expected 4 fields `<id> <q> <digits> <threshold-exponent>`, found {}",
                fields.len()
            )));
        };
        lookup(id).map_err(|e| fail(e.to_string()))?;
        let q = NomeSpec::parse(q).map_err(|e| fail(e.to_string()))?;
        let digits: u32 = digits
            .parse()
            .map_err(|_| fail(format!("digits `{digits}` is not a positive integer")))?;
        if digits < MIN_DIGITS {
            return Err(fail(format!("digits {digits} below the minimum of {MIN_DIGITS}")));
        }
        let threshold_exponent: u32 = threshold
            .parse()
            .ok()
            .filter(|&e| e > 0)
            .ok_or_else(|| fail(format!("threshold exponent `{threshold}` is not a positive integer")))?;
        out.push(FixtureCase {
            line: i + 1,
            id: id.to_string(),
            q,
            digits,
            threshold_exponent,
        });
    }
    Ok(out)
}

/// Runs one case at its own precision and threshold.
pub fn run_fixture(case: &FixtureCase) -> Result<ResidualReport> {
    let ctx = make_context(case.digits)?;
    let q = case.q.to_nome(&ctx)?;
    let threshold = BigReal::pow10(-i64::from(case.threshold_exponent), &ctx);
    verify_identity_with(&case.id, &q, &ctx, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn parses_both_nome_forms_and_comments() {
        let text = "# header\nT3.1 0.1 60 50\n\nD3a e^-pi*sqrt(4/9) 30 20  # trailing\n";
        let cases = parse_fixtures(text).unwrap();
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[0].line, 2);
        assert_eq!(cases[1].q, NomeSpec::Singular(Rational64::new(4, 9)));
        assert_eq!(cases[1].threshold_exponent, 20);
    }

    #[test]
    fn rejects_malformed_lines() {
        let line_of = |t: &str| match parse_fixtures(t) {
            Err(Error::Fixture { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line_of("T3.1 0.1 60"), 1);
        assert_eq!(line_of("\nT9.9 0.1 60 50"), 2);
        assert_eq!(line_of("T3.1 0.1 5 50"), 1);
        assert_eq!(line_of("T3.1 0.1 60 0"), 1);
        assert_eq!(line_of("T3.1 x 60 50"), 1);
    }

    #[test]
    fn runs_a_case() {
        let case = &parse_fixtures("T3.2 0.1 30 20").unwrap()[0];
        let report = run_fixture(case).unwrap();
        assert!(report.pass, "{report:?}");
    }
}

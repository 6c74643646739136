use std::sync::OnceLock;

use super::expr::Expr;
use super::parser::parse;
use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../../data/closed_forms.txt");

/// Labelled closed forms in file order.
#[derive(Debug, Clone)]
pub struct ClosedFormRegistry {
    entries: Vec<(String, Expr)>,
}

impl ClosedFormRegistry {
    /// Parses `<label> := <expression>` lines; blank lines and `#` comments
    /// are skipped. Labels must be unique.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, Expr)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fixture = |message: String| Error::Fixture { line: i + 1, message };
            let (label, body) = line
                .split_once(":=")
                .ok_or_else(|| fixture("expected `<label> := <expression>`".into()))?;
            let label = label.trim();
            if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(fixture(format!("invalid label `{label}`")));
            }
            if entries.iter().any(|(l, _)| l == label) {
                return Err(fixture(format!("duplicate label `{label}`")));
            }
            let expr = parse(body).map_err(|e| fixture(e.to_string()))?;
            entries.push((label.to_string(), expr));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, label: &str) -> Result<&Expr> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, e)| e)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Expr)> {
        self.entries.iter().map(|(l, e)| (l.as_str(), e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The built-in registry of closed forms.
pub fn closed_form_registry() -> &'static ClosedFormRegistry {
    static REGISTRY: OnceLock<ClosedFormRegistry> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        ClosedFormRegistry::parse(EMBEDDED).expect("embedded closed-form file is well formed")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_registry_loads() {
        let r = closed_form_registry();
        assert_eq!(r.len(), 29);
        assert!(r.get("alpha_36").is_ok());
        assert_eq!(r.get("alpha_13"), Err(Error::UnknownLabel("alpha_13".into())));
    }

    #[test]
    fn malformed_lines_report_their_number() {
        let err = ClosedFormRegistry::parse("a := 1\n\nb = 2\n").unwrap_err();
        assert!(matches!(err, Error::Fixture { line: 3, .. }));
        let dup = ClosedFormRegistry::parse("a := 1\na := 2\n").unwrap_err();
        assert!(matches!(dup, Error::Fixture { line: 2, .. }));
        let bad = ClosedFormRegistry::parse("a := 2^^3\n").unwrap_err();
        assert!(matches!(bad, Error::Fixture { line: 1, .. }));
    }
}

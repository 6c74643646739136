use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use singular_moduli::{BigReal, Error};

/// One output line: a value, optionally checked against something else.
#[derive(Debug, Serialize)]
pub struct Row {
    pub label: String,
    pub value: Option<String>,
    pub residual: Option<String>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Everything a command prints. Field order is the JSON key order.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: BTreeMap<&'static str, String>,
    pub digits: u32,
    pub results: Vec<Row>,
    #[serde(skip)]
    pub notes: Vec<String>,
}

const RESIDUAL_DIGITS: usize = 3;

impl Report {
    pub fn new(command: &'static str, digits: u32) -> Self {
        Report {
            command,
            inputs: BTreeMap::new(),
            digits,
            results: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.inputs.insert(key, value.to_string());
        self
    }

    fn render(&self, x: &BigReal) -> String {
        x.to_decimal_string(self.digits as usize)
    }

    /// A plain value with nothing to check.
    pub fn value(&mut self, label: impl Into<String>, x: &BigReal) {
        let value = Some(self.render(x));
        self.results.push(Row { label: label.into(), value, residual: None, pass: true, error: None });
    }

    /// A value with its residual against an independent evaluation.
    pub fn checked(&mut self, label: impl Into<String>, x: &BigReal, residual: &BigReal, threshold: &BigReal) {
        let value = Some(self.render(x));
        self.results.push(Row {
            label: label.into(),
            value,
            residual: Some(residual.to_decimal_string(RESIDUAL_DIGITS)),
            pass: residual < threshold,
            error: None,
        });
    }

    /// A case that could not be evaluated; counts as a failure.
    pub fn failed(&mut self, label: impl Into<String>, e: &Error) {
        self.results.push(Row {
            label: label.into(),
            value: None,
            residual: None,
            pass: false,
            error: Some(e.to_string()),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn to_text(&self) -> String {
        let width = self.results.iter().map(|r| r.label.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        for row in &self.results {
            let pad = width - row.label.chars().count();
            let _ = write!(out, "{}{} = ", row.label, " ".repeat(pad));
            match (&row.value, &row.error) {
                (Some(v), _) => out.push_str(v),
                (None, Some(e)) => {
                    let _ = write!(out, "error: {e}");
                }
                (None, None) => out.push('-'),
            }
            if let Some(r) = &row.residual {
                let _ = write!(out, "  [residual {r}, {}]", if row.pass { "PASS" } else { "FAIL" });
            } else if row.error.is_some() {
                out.push_str("  [FAIL]");
            }
            out.push('\n');
        }
        out
    }
}

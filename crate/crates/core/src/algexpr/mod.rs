//! Exact algebraic expressions: a small grammar, a parser, high-precision
//! evaluation and numeric equality with precision escalation.

mod eval;
mod expr;
mod parser;
mod registry;

pub use eval::{equal_numeric, eval_expr, relative_difference};
pub use expr::Expr;
pub use parser::parse;
pub use registry::{closed_form_registry, ClosedFormRegistry};

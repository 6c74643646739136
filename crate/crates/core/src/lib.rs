//! High-precision evaluation and verification of singular moduli, class
//! invariants, modular equations and Ramanujan-type continued fractions.
//!
//! Every quantity is computed with [`numerics::BigReal`] under an explicit
//! [`numerics::PrecisionContext`]; identities are checked by relative
//! residuals rather than trusted.

pub mod algexpr;
pub mod elliptic;
pub mod error;
pub mod explicit;
pub mod invariants;
pub mod modeq;
pub mod numerics;
pub mod qseries;
pub mod singular_cf;

pub use error::{Error, Result};
pub use numerics::{make_context, BigReal, PrecisionContext};
pub use qseries::{Nome, NomeSpec};

/// The guide's code samples, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/precision.md")]
    mod precision {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/moduli.md")]
    mod moduli {}
    #[doc = include_str!("../../../book/src/invariants.md")]
    mod invariants {}
    #[doc = include_str!("../../../book/src/modular-equations.md")]
    mod modular_equations {}
    #[doc = include_str!("../../../book/src/continued-fractions.md")]
    mod continued_fractions {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

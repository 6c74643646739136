//! Registry of modular identities, a residual-based verifier and small-`q`
//! factor analysis for the mixed modular equations.

mod eta;
mod fixtures;
mod limits;
mod registry;
mod verify;

pub use eta::{eval_eta_quotient, EtaFactor, EtaQuotient, ThetaSign};
pub use fixtures::{parse_fixtures, run_fixture, FixtureCase};
pub use limits::{factor_limit_check, theorem_factors, Factor, FactorLimitReport, FactorReport, Laurent};
pub use registry::{identities, identity_ids, lookup, theorem_pq, Identity, Sides};
pub use verify::{
    canonical_grid, relative_residual, verify_identity, verify_identity_with, verify_suite,
    ResidualReport, SuiteCase, SuiteReport, THRESHOLD_LOSS,
};

//! Steering feasibility solvers and decomposition optimizers: 1SDI
//! local-hidden-state feasibility, dimension-bounded LHV-LHS search
//! (1SSDI / superunsteerability), and Schrödinger strength.

pub mod lhs;
pub mod lhvlhs;
pub mod strength;
pub mod simplex;

pub use lhs::{lhs_feasibility_assemblage, lhs_feasibility_box, Feasibility, LhsConfig, LhsModel};
pub use lhvlhs::{lhvlhs_search, superunsteerability_verdict, LhvLhsConfig, LhvLhsModel, LhvLhsOutcome, SuperunsteerabilityVerdict};
pub use strength::{schrodinger_strength_box, schrodinger_strength_state, SsConfig, SsResult, StateSsConfig, StateSsResult};

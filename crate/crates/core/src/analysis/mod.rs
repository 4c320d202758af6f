//! Does an empirical model admit one global outcome distribution?
//!
//! Three checks of decreasing coarseness: possibilistic consistency of the
//! support, linear-programming feasibility over deterministic assignments,
//! and the CHSH expression for two binary parties.

mod assignments;
mod chsh;
mod lhv;
mod logical;
mod report;
pub mod simplex;

pub use assignments::{
    enumerate_assignments, Assignments, GlobalAssignment, SlotLayout, MAX_ASSIGNMENTS,
};
pub use chsh::{chsh, chsh_detail, ChshValue, SignMap};
pub use lhv::{certificate_classical_bound, certificate_value, lhv_feasibility, DEFAULT_TOL};
pub use logical::{consistent_assignments, logical_contextuality};
pub use report::{
    Certificate, CertificateTerm, FeasibilityReport, Verdict, WeightedAssignment, Witness,
};

//! Exact desk-scale simulation of extended Wigner's-friend protocols built on
//! an antidistinguishing two-qubit measurement, and mechanical checks that
//! their outcome tables admit no single global distribution.
//!
//! * [`qsim`]: labeled dense state vectors, projective measurements, sampling.
//! * [`pbr`]: the entangled basis, preparations and the decoding basis.
//! * [`scenarios`]: protocol builders, exact tables, tomography.
//! * [`empirical`]: tables, supports, no-signalling, JSON interchange.
//! * [`analysis`]: logical contextuality, LHV feasibility, CHSH.
//! * [`claims`]: the verification checklist driven by the CLI.

pub mod analysis;
pub mod claims;
pub mod empirical;
pub mod error;
pub mod pbr;
pub mod qsim;
pub mod scenarios;

pub use analysis::{FeasibilityReport, Verdict};
pub use empirical::{Context, EmpiricalModel, Signature, SupportModel};
pub use error::{Error, Result};
pub use pbr::ChoiceAmplitudes;
pub use qsim::{OutcomeDistribution, ProjectiveMeasurement, StateVector, C64};
pub use scenarios::{Party, Scenario, TomographyEstimate};

/// Crate version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Lane–Emden system ground states, half-space corrections, the two-bubble
//! ansatz and the reduced energy of the slightly perturbed problem.

pub mod ansatz;
pub mod constants;
pub mod error;
pub mod fit;
pub mod halfspace;
pub mod io;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod radial_ode;
pub mod reduced_energy;
pub mod verify;

pub use ansatz::{AnsatzField, FieldKind};
pub use constants::{compute_constants, BMode, EnergyConstants};
pub use error::{Error, Result};
pub use halfspace::{HalfSpaceCorrection, Which};
pub use params::{CaseTag, ConditionClass, ConditionP, ProblemParams, ScalingExponents};
pub use radial_ode::{
    find_ground_state, find_ground_state_with, Classification, RadialProfile, Sample,
    SolverOptions, TailFit,
};
pub use reduced_energy::{JExpansion, ReducedEnergy, ReducedSummary};
pub use verify::{ExpansionReport, Harness, Verdict};

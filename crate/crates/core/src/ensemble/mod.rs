//! Discrete-atom oracle.
//!
//! Keeps every atom's optical and spin coherence and the cavity field, so
//! that neither the Raman elimination of the excited state nor the
//! continuum diffraction function is assumed. Agreement with
//! [`crate::dynamics`] in the Raman limit at moderate atom numbers is the
//! check on both approximations.

mod compare;
mod full;
mod lattice;

pub use compare::{compare_models, lattice_sinc_error, ModelComparison, SINC_TOLERANCE};
pub use full::{
    integrate_full, oracle_step_limit, oracle_substeps, FullTrajectory, DEFAULT_ORACLE_ATOMS,
    WEAK_FIELD_THRESHOLD,
};
pub use lattice::{continuum, diffraction, dirichlet, AtomEnsemble, Placement};

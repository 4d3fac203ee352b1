//! Cavity-assisted off-resonant Raman quantum memory in which the stored
//! spin waves are addressed by ramping the refractive index seen by the
//! control field.
//!
//! [`model`] holds parameters, index schedules, pulses and the spin-wave
//! mode grid. [`dynamics`] integrates the collective mode equations through
//! storage and retrieval. [`analytics`] has the closed forms for retrieval,
//! channel crosstalk and the index budget. [`ensemble`] is the atom-by-atom
//! model used to check the collective one.

pub mod analytics;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod numeric;

pub use error::{MemoryError, Result};

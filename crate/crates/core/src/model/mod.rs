//! Physical parameters, index schedules, input pulses, and the spin-wave
//! mode grid.

mod modes;
mod params;
mod pulse;
mod schedule;

pub use modes::{build_mode_grid, ModeGrid, DEFAULT_MAX_MODES};
pub use params::{derive_params, DerivedParams, DesignTargets, MemoryParams, DEFAULT_RAMAN_FACTOR};
pub use pulse::{
    make_gaussian_pulse, Pulse, PulseKind, TimeGrid, BOUNDARY_THRESHOLD, GRID_HALF_WIDTH_FWHM,
};
pub use schedule::{IndexSchedule, Segment};

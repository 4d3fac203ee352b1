//! Closed-form references: the adiabatic imprint and retrieval envelopes,
//! the impedance-matching curve, the index budget, and channel crosstalk.

mod capacity;
mod crosstalk;
mod retrieval;

pub use capacity::{capacity, CapacityReport, ChannelRow};
pub use crosstalk::{
    channel_isolation_demo, crosstalk_approx, crosstalk_exact, total_leakage, ChannelEnergies,
    ChannelIsolation, CrosstalkSpec, NARROWBAND_LIMIT, SPEED_OF_LIGHT,
};
pub use retrieval::{
    analytic_backward, analytic_forward, analytic_spin_imprint, backward_envelope,
    efficiency_vs_kappa, efficiency_with_reabsorption, forward_envelope, log_grid,
    pulse_bandwidth, retrieval_amplitude, Imprint, KappaPoint, ADIABATIC_LIMIT,
};

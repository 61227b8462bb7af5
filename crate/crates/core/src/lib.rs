//! Extreme-value analysis of a spectrum-sharing secondary link with transmit
//! antenna selection over Rayleigh fading.
//!
//! - [`special`]: `Γ(0, x)` and the principal Lambert W branch.
//! - [`channel`]: link parameters, channel sampling, power rule, SINR, TAS.
//! - [`exact`]: exact SINR distribution, quantiles, quadrature capacities.
//! - [`evt`]: Gumbel normalizing constants, asymptotic mean/outage capacity
//!   in the exact, IPLR and TPLR formula sets, and the MDA check.
//! - [`montecarlo`]: deterministic parallel simulation used as ground truth.
//! - [`units`]: dB conversions used at the I/O boundary.

pub mod channel;
pub mod error;
pub mod evt;
pub mod exact;
pub mod montecarlo;
pub mod special;
pub mod units;

pub use channel::{best_antenna, sample_channel, sinr, transmit_power, ChannelDraw, RngStream, SystemParams};
pub use error::{Error, Result};
pub use evt::{
    asymptotic_mean_capacity, asymptotic_outage_capacity, gumbel_constants_rate, gumbel_constants_sinr,
    iplr_constants, tplr_constants, tplr_low_constants, verify_mda_condition, Family, GumbelConstants,
    MdaDiagnostics, RegimeFormulas, E0,
};
pub use exact::{
    exact_mean_capacity, exact_outage_capacity, sinr_ccdf, sinr_cdf, sinr_cdf_max, sinr_quantile,
    QuantileSolverConfig,
};
pub use montecarlo::{estimate_mean_capacity, estimate_outage_capacity, CapacityEstimate, InterferenceGain, SimulationPlan};

//! Per-interval transmission chain: listen-before-talk, uplink pilots and
//! channel estimation, zero-forcing precoding and link metrics.

pub mod lbt;
pub mod metrics;
pub mod pilots;
pub mod precoder;

pub use lbt::{conventional_lbt, enhanced_lbt, expected_filtered_power, lbt_decision, LbtOutcome};
pub use metrics::{ue_rate, ue_sinr, wifi_interference, BsTransmission, SinrTerms};
pub use pilots::{
    estimate_ue_channels, received_pilot_block, uplink_pilot_power, CsiEstimate, PilotBook, PilotTransmission,
    WiFiPilotInterference,
};
pub use precoder::{zf_precoder, PrecoderState};

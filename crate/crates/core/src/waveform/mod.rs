//! Receive-signal synthesis and the autocorrelation front-end.
//!
//! The transmit pulse is a Gaussian monocycle, the receive filter is matched
//! to it, and the channel is a Saleh–Valenzuela multipath realization. Noise
//! is white with density `N0/2` before the receive filter, and `Eb = 1` per
//! channel symbol.

mod channel;
mod frontend;
mod pulse;
mod semi;

pub use channel::{ChannelModel, ChannelRealization, SvParams, Tap};
pub use frontend::{
    acr_front_end, make_receive_pulse, observe_windows, synthesize_block, FrontEndConfig,
    ReceivePulse, SlotVectors, Waveform,
};
pub use pulse::{power_response, NoiseStats, PulseFilters, PulseShape, PulseSpec};
pub use semi::{semi_analytic_z, SemiAnalyticModel};

//! Secrecy rates for modulo-additive discrete memoryless wiretap channels
//! with noisy feedback.
//!
//! The destination of a modulo-additive channel can encrypt over the channel
//! itself: feeding back random symbols turns its transmission into a private
//! key that the channel adds into the wiretapper's observation, while the
//! destination cancels the key from its own. This crate provides
//!
//! - [`infotheory`]: exact finite-alphabet entropy / mutual-information
//!   primitives (base 2 throughout);
//! - [`channels`]: wiretap channel construction, including the five binary
//!   symmetric correlation structures and their degradation constructions;
//! - [`rates`]: closed-form secrecy capacities, public-discussion bounds,
//!   and the half-duplex achievable-rate optimizer;
//! - [`simulate`]: seeded end-to-end runs of the feedback scheme, exact
//!   wiretapper-information enumeration, and equivocation estimation.

pub mod channels;
pub mod infotheory;
pub mod rates;
pub mod simulate;

pub use channels::{build_bsc_case, BscCase, ChannelError, WiretapChannel};
pub use infotheory::{
    binary_entropy, cyclic_convolve, entropy, modulo_channel_capacity, mutual_information,
    InfoError, JointPmf, Pmf,
};
pub use rates::{
    full_duplex_secrecy_capacity, general_half_duplex_rate, half_duplex_bsc_rate,
    optimize_half_duplex, public_discussion_bounds, rate_report, secrecy_capacity_bsc,
    HalfDuplexSolution, PublicDiscussionBounds, RateError, RateReport, TightCase,
};
pub use simulate::{
    exact_wiretap_mi, plug_in_equivocation, run_full_duplex, run_half_duplex, write_transcripts,
    Codebook, DuplexMode, SchemeConfig, SimError, SimOutcome, Transcript, TrialRunner,
};

//! Analysis and simulation of a two-hop relay network that keeps messages
//! secret from an eavesdropper while the relay buffers decoded packets.
//!
//! The relay can operate full-duplex (receive and forward in the same slot,
//! paying a residual self-interference penalty) or half-duplex (store or
//! forward, steered by a per-occupancy tie-break policy). The crate provides:
//!
//! - per-slot secrecy rates for every transmission mode ([`rates`]),
//! - the indicator-driven mode selection rule ([`policy`]),
//! - exact stationary analysis of the resulting buffer birth-death chain and
//!   its secure throughput ([`markov`]),
//! - Monte Carlo estimation of the indicator event probabilities
//!   ([`montecarlo`]),
//! - linear-fractional optimization of the tie-break policy ([`optimize`]),
//! - a slot-level simulator used to cross-validate the analysis ([`sim`]),
//! - independent slow reference implementations backing the test suites
//!   ([`reference`]).
//!
//! The crate is `no_std` (with `alloc`); all floating-point math goes through
//! `libm`.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

pub mod channel;
pub mod markov;
pub mod montecarlo;
pub mod optimize;
pub mod policy;
pub mod rates;
pub mod reference;
pub mod rng;
pub mod sim;

pub use channel::{ChannelDraw, SinrSet, SystemParams};
pub use markov::{ModeProbabilities, StationaryDistribution};
pub use montecarlo::{EventCounts, ProbEstimate};
pub use optimize::PolicySolution;
pub use policy::{IndicatorMask, Indicators, Mode, QueuePolicy};
pub use rates::SecrecySnapshot;
pub use sim::{SchemeVariant, SimReport};

//! Joint RF beamforming and lightwave power allocation for hybrid RF/VLC
//! ultra-small-cell networks with simultaneous wireless information and
//! power transfer.
//!
//! Luminaires made of several angle-diverse LED elements carry data and
//! light energy; a multi-antenna RF access point tops up harvested power
//! with energy beams. The lightwave side picks a common DC bias and AC
//! swing that maximize the minimum VLC SNR, and hands each device an RF
//! harvesting target; the RF side finds the minimum-power beams that meet
//! those targets.
//!
//! - [`geometry`], [`channel`]: luminaire layouts, LOS gains, Rician RF channels.
//! - [`models`], [`lambert`]: SNR, light and RF harvesting, illuminance, Lambert W.
//! - [`lightwave`]: bias, swing and RF-target allocation.
//! - [`sdp`], [`beamforming`]: the aggregate power-minimization SDP and beam recovery.
//! - [`orchestrator`]: centralized and semi-decentralized control-message flows.
//! - [`scenario`], [`experiments`], [`output`]: configuration, sweeps, CSV/JSON.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod lambert;
pub mod lightwave;
pub mod models;
pub mod orchestrator;
pub mod output;
pub mod scenario;
pub mod sdp;

pub use error::{Error, Result};
pub use scenario::Scenario;

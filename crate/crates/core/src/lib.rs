//! System-level simulator core for a stratospheric-platform backhaul built
//! around a reconfigurable reflecting surface.
//!
//! A fixed donor ground station reaches battery-powered gateways through a
//! surface mounted on a high-altitude platform. The crate models the
//! deployment geometry ([`scenario`]), the air-to-ground channel
//! ([`channel`]), passive and sub-connected active surface architectures
//! ([`ris`]), rate/power/feasibility metrics ([`metrics`]) and the Monte
//! Carlo campaign engine ([`engine`]).

pub mod channel;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod ris;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};

//! Completely positive maps in Kraus, Choi and Stinespring form.
//!
//! Choi states use the normalized maximally entangled state, so a
//! trace-preserving map has a unit-trace Choi state whose input marginal is
//! maximally mixed. The reference (input copy) comes first in the Choi layout.

mod error;
mod rep;
mod zoo;

pub use error::ChannelError;
pub use rep::{apply_kraus, choi_inverse, choi_layout, ChannelKind, ChannelRep, TraceFlag};
pub use zoo::{random_channel, standard_channel, StandardChannel};

//! Cone-based topology control for multihop wireless networks.
//!
//! Nodes grow their transmit power until every cone of angle α around them
//! contains a neighbor (or they hit maximum power). The resulting graph keeps
//! the connectivity of the max-power graph for α ≤ 5π/6, and several
//! optimizations thin it further.

pub mod cbtc;
pub mod constructions;
pub mod error;
pub mod exec;
pub mod export;
pub mod geometry;
pub mod harness;
pub mod network;
pub mod optimizations;
pub mod radio;
pub mod reconfig;

pub use error::{Error, Result};

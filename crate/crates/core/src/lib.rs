//! System-level Monte Carlo simulator for massive MIMO base stations that
//! share an unlicensed band with Wi-Fi hotspots.
//!
//! The pipeline of one coherence interval runs, per base station: listen to
//! the Wi-Fi population and estimate its spatial covariance, split the array
//! dimensions between users and nulls, pick the users to serve, run a
//! projected listen-before-talk test, estimate user channels from uplink
//! pilots inside the projected space and transmit with zero-forcing.
//!
//! Modules follow that pipeline:
//!
//! - [`topology`]: hexagonal layout with wrap-around and device drops
//! - [`channel`]: path loss, shadowing, antenna pattern and Ricean fading
//! - [`subspace`]: covariance estimation, eigen-decomposition, projectors
//! - [`scheduler`]: degrees-of-freedom split and user selection
//! - [`phy`]: listen-before-talk, pilots, channel estimation, precoding, SINR
//! - [`sim`]: drops, experiments and aggregation
//! - [`cli`]: configuration files and the batch command line

pub mod channel;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod phy;
pub mod rng;
pub mod scheduler;
pub mod sim;
pub mod subspace;
pub mod topology;
pub mod units;

pub use error::{Error, Result};

//! Monte Carlo laboratory for power-law shot-noise fields driven by marked
//! Poisson point processes.
//!
//! The crate simulates additive and extremal shot-noise fields with power-law
//! response functions, checks their rescaled convergence to one-sided stable
//! and Frechet white-noise limits, and reproduces the wireless-network
//! consequences of those limits at desk scale: SIR tail scaling, joint SINR
//! bounds along a relay chain, and SINR-graph percolation on a lattice.
//!
//! Everything is driven by seeded, substreamed RNG so that any experiment is
//! bit-reproducible regardless of worker count.

pub mod config;
pub mod error;
pub mod experiments;
pub mod field;
pub mod limits;
pub mod point_process;
pub mod quad;
pub mod response;
pub mod rng;
pub mod runner;
pub mod stats;
pub mod unionfind;

pub use error::{Error, Result};

/// Crate version recorded in every JSON summary.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

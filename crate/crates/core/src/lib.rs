//! Simulation and verification toolkit for the agreement (distributed
//! averaging) algorithm
//!
//! ```text
//! x_i(t+1) = sum_j A_ij(t) x_j(tau_ij(t))
//! ```
//!
//! with time-varying stochastic weights and bounded, possibly non-FIFO
//! communication delays.
//!
//! Indices are 0-based throughout, both in the API and in serialized files.

pub mod delay;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod monitor;
pub mod scenario;
pub mod sim;
pub mod trace;

pub use error::{Error, Result};

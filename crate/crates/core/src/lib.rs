//! Resolving sets for the bilinear forms graph H_q(n, d).
//!
//! The crate builds an explicit landmark family of size `q^{n+d-1}`
//! (`n >= d + 2`) or `q^{n+d}` (`d <= n <= d + 1`), verifies exhaustively that
//! it resolves the graph, produces separating witnesses for vertex pairs, and
//! compares the family size with Babai's bounds and with greedy and exact
//! baselines.

pub mod bilform;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod gf;
pub mod linalg;
pub mod partition;
pub mod resolving;
pub mod selftest;

pub use error::{Error, Result};

//! Exact, desk-scale tools for deterministic communication complexity.
//!
//! Boolean functions are explicit sign matrices ([`matrix`]). On top of them
//! sit monochromatic rectangles and covers ([`rect`]), entropy-driven
//! rectangle extraction from XOR lifts ([`entropy`]), protocol trees with
//! balancing and exact search ([`protocol`]), and the recursive
//! rank-splitting protocol builder with its budget audit ([`builder`]).
//! [`cli`] wires them into the `cclab` binary.

pub mod builder;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod limits;
pub mod matrix;
pub mod protocol;
pub mod rect;
pub mod rng;

pub use error::{Error, Result};
pub use limits::SearchLimits;

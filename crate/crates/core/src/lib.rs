//! Incremental learning of Event Calculus definitions.
//!
//! The crate learns `initiatedAt`/`terminatedAt` rules from a stream of
//! annotated windows. Each hypothesis clause keeps a support set of
//! most-specific clauses, so a revision needs at most one pass over the
//! stored history.

#[cfg(test)]
mod fixtures;

pub mod ec;
pub mod error;
pub mod incremental;
pub mod induction;
pub mod io;
pub mod kernel;
pub mod logic;
pub mod solver;

pub use error::{Error, Result};

//! Repairing inconsistent relational databases under denial constraints,
//! guided by an acyclic priority relation between conflicting facts.

pub mod conflict;
pub mod context;
pub mod error;
pub mod families;
pub mod format;
pub mod generators;
pub mod model;
pub mod oracles;
pub mod pcqa;
pub mod priority;
pub mod repair;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};

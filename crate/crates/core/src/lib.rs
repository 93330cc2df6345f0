//! Multilayer resource-aware partitioning and deadline-constrained service
//! placement for fog infrastructures.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod metrics;
pub mod model;
pub mod multilayer;
pub mod partition;
pub mod placement;
pub mod scenario;
pub mod simulator;
pub mod topology;

pub use error::{Error, Result};

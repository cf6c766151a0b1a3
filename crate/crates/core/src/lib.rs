//! Multi-robot shape formation by alternating gradient flows with virtual
//! intermittent diffusion.
//!
//! Robots are attracted to a target point set by the mean squared distance
//! `F`, kept apart by a short-range barrier `G`, and shaken out of local
//! minima by diffusion episodes that are simulated offline. Only the endpoint
//! of each episode is used, as a set of intermediate targets the robots then
//! descend toward.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod init;
pub mod planner;
pub mod potentials;
pub mod shape;

pub use error::{Error, Result};

/// Plane vector used for positions, gradients and displacements.
pub type Vec2 = nalgebra::Vector2<f64>;

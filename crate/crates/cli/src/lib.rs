//! Configuration, batch runs, verification and plotting behind the `idform`
//! binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod plot;
pub mod trajectory;
pub mod verify;

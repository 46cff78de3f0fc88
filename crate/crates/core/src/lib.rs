//! Echo reservoir computing: fading-memory orbits and filters, echo state
//! networks, liquid state machines, qubit-register reservoirs and a bench
//! for fitting polynomial readouts against reservoir capacity.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod esn;
pub mod lab;
pub mod linalg;
pub mod lsm;
pub mod poly;
pub mod qrc;
pub mod rng;
pub mod signals;

pub use error::{Error, Result};

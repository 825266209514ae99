//! Metastability of continuous-time Markov chains on finite state spaces:
//! capacities, flows and variational principles, collapsed and trace
//! processes, and exact and Monte Carlo computations for the Ising model and
//! condensing zero-range processes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod collapse;
pub mod corpus;
pub mod error;
pub mod linalg;
pub mod markov;
pub mod montecarlo;
pub mod potential;
pub mod flows;
pub mod ising;
pub mod report;
pub mod rng;
pub mod trace;
pub mod variational;
pub mod verify;
pub mod zrp;

pub use error::{Error, Result};

//! Exact classical simulation of combination sieves for the hidden shift
//! problem on cyclic groups `Z_N`.
//!
//! The crate tracks phase elements `|0> + chi(s*l/N)|1>` by their labels,
//! drives them through combination routines backed by a suite of subset-sum
//! solvers, recovers the hidden shift, and accounts for every query and
//! solver operation along the way.

pub mod cli;
pub mod combine;
pub mod cost_model;
pub mod error;
pub mod group_arith;
pub mod instance;
pub mod phase_sim;
pub mod pipeline;
pub mod recover;
pub mod seeding;
pub mod subset_sum;

pub use error::{Error, Result};

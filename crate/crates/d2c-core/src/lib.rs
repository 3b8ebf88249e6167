//! Causal link prediction from observational data via asymmetric
//! Markov-blanket dependency descriptors.
//!
//! The pipeline: simulate data from random structural-equation DAGs
//! ([`dag`], [`data`]), estimate (conditional) mutual information from
//! samples ([`estimator`]), rank approximate Markov blankets ([`mb`]),
//! extract a fixed-length descriptor vector for an ordered variable pair
//! ([`descriptors`]), train a random forest mapping descriptors to a
//! causal-link score ([`forest`]), and evaluate with BER/AUPRC
//! ([`metrics`], [`experiment`]).
//!
//! This crate is `no_std` + `alloc`; all file formats, the CLI, and
//! parallel drivers live in the companion `d2c-cli` crate. Every
//! operation is a pure function of its inputs and seeds, so results are
//! bit-reproducible and safe to parallelize from the outside.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dag;
pub mod data;
pub mod descriptors;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod forest;
pub mod mb;
pub mod metrics;

pub(crate) mod linalg;
pub(crate) mod math;
pub mod rng;

pub use error::{Error, Result};

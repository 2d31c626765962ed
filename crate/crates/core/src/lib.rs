//! Hybrid quantum-classical binary classifier.
//!
//! A trainable 512 -> 4 linear layer feeds a simulated 4-qubit variational
//! circuit whose Pauli-Z readout goes through a 4 -> 2 linear head. The crate
//! also carries the pieces around that model: a dense statevector simulator,
//! dense-layer primitives with Adam, the data pipeline, confusion-matrix
//! metrics with McNemar's test, checkpoints and OpenQASM export.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod gradcheck;
pub mod io;
pub mod metrics;
pub mod model;
pub mod nn;
pub mod qasm;
pub mod rng;
pub mod statevector;
pub mod vqc;

pub use error::{Error, Result};

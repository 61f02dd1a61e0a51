//! Simulation of low-depth random circuits by transversal computation.
//!
//! A circuit over many physical qubits is read as a tensor network, virtual
//! logical qubits are threaded across the entangling layers, and the network
//! is re-read as a small circuit over those logical qubits. Amplitudes of the
//! small circuit are evaluated with a dense state vector, and samples are
//! drawn from computed amplitudes with a threshold-rejection sampler.
//!
//! Module map:
//!
//! - [`circuit`]: layouts, gates, the three random circuit families.
//! - [`network`]: tensors, tensor networks and the rewrite widgets.
//! - [`rewrite`]: slice planning and renormalization to a [`rewrite::LogicalCircuit`].
//! - [`statevector`]: dense state-vector engine and both amplitude paths.
//! - [`sampler`]: Porter-Thomas analytics and threshold-rejection sampling.
//! - [`verify`]: brute-force oracles and equivalence fuzzing.

pub mod circuit;
pub mod error;
pub mod network;
pub mod rewrite;
pub mod sampler;
pub mod statevector;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default maximum arity of a logical gate.
pub const DEFAULT_MAX_ARITY: usize = 6;

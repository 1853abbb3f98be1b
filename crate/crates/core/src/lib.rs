//! Polynomial-time simulation of free-fermion (matchgate) quantum circuits.
//!
//! Gates are quadratic Majorana Hamiltonians `H = (i/4)·cᵀ A c` with `A` real
//! skew-symmetric. Evolving under such a gate rotates the Majorana operators by
//! the orthogonal matrix `R = exp(-A·t)`, and circuits compose by multiplying
//! their `R` matrices. Measurement probabilities `p(y|x)` of computational
//! basis inputs then reduce, through Wick's theorem, to the Pfaffian of a
//! matrix whose width is linear in the number of qubits.
//!
//! Modules:
//!
//! - [`skewlin`]: canonical decomposition, skew exponential, complex Pfaffian.
//! - [`fermiops`]: gates, circuits, `R` composition and Pauli export.
//! - [`measure`]: the Wick/Pfaffian measurement engine.
//! - [`oracle`]: exact-diagonalization reference and exhaustive MaxCut.
//! - [`optimize`]: objectives, finite-difference gradients, Adam, training.
//!
//! Conventions used throughout: modes and qubits are 0-based, qubit 0 is the
//! leftmost character of a bitstring and the most significant bit of a basis
//! index, and a `1` bit is an occupied fermionic mode.
#![no_std]

extern crate alloc;

pub mod error;
pub mod fermiops;
pub mod measure;
pub mod optimize;
pub mod oracle;
pub mod skewlin;

pub use error::{Error, Result};
pub use fermiops::{Circuit, GateKind, GateSpec, ModePair, PairBlock, Pauli, PauliTerm};
pub use measure::{Bits, CircuitEvaluator, MeasurementQuery};
pub use skewlin::{ComplexSkewMatrix, RMatrix, SkewMatrix};

//! Finite-dimensional machinery for operator and commutator moduli of
//! continuity of functions of normal matrices.
//!
//! The crate is `no_std` and needs only `alloc`. Everything is a pure
//! function of its inputs; randomized searches take explicit seeds.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fourier;
pub mod function;
pub mod holder;
pub mod lattice;
pub mod linalg;
pub mod moduli;
pub mod quad;
pub mod rng;
pub mod schur;

pub use error::{Error, Result};
pub use function::FunctionSpec;
pub use linalg::{ComplexMatrix, NormalOperator, OperatorClass};
pub use num_complex::Complex64 as C64;

/// Tolerance shared by every unitarity, self-adjointness and projection check.
pub const CLASS_TOL: f64 = 1e-10;

//! Dirichlet characters mod an odd prime q, L-function evaluation on the
//! real segment sigma in (1/2, 3], and the resonance moments Q1, Q2 used to
//! certify large character values.
//!
//! The group of characters mod prime q is cyclic of order m = q - 1; fixing
//! the smallest primitive root g identifies it with Z/m via
//! chi_j(n) = e(j * ind(n) / m), where ind is the discrete log base g.
//! Everything downstream (orthogonality, batch transforms, moments) is
//! phrased in terms of that indexing.
//!
//! Layout:
//! - [`arith`]: sieves, deterministic Miller-Rabin, primitive roots, discrete logs
//! - [`characters`]: the character group and the all-characters transform
//! - [`lfun`]: Hurwitz zeta via Euler-Maclaurin, L(s, chi), branch-tracked log L,
//!   truncated Dirichlet sums, L'/L
//! - [`resonator`]: resonance coefficients r(n), the weights |R(chi)|^2, the
//!   moments Q1/Q2, the ratio lower bound and the max >= mean certificate
//! - [`constants`]: the growth-rate constants (lambda, vartheta, admissible A,
//!   predicted lower-bound constants)
//!
//! With the default `parallel` feature the batch sweeps run on rayon; results
//! are bit-identical to the sequential build because all reductions use a
//! fixed chunking (see [`parallel`]).

pub mod arith;
pub mod characters;
pub mod constants;
pub mod error;
pub mod lfun;
pub mod parallel;
pub mod resonator;

pub use error::{BranchFailure, CoreError, Result};

/// Complex number type used throughout.
pub type C64 = num_complex::Complex64;

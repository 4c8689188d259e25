//! Refined analytic torsion at desk scale.
//!
//! The library computes, for finite-dimensional models of the odd signature
//! operator and for flat line bundles over the circle:
//!
//! * graded zeta-determinants over an Agmon angle ([`oddsig::graded_det`]),
//! * the xi and eta invariants and the refined torsion ([`oddsig`]),
//! * combinatorial (Turaev-style) torsion of twisted CW complexes ([`comb`]),
//! * exactly solvable continuum circle models, representation-variety sweeps
//!   and holomorphy diagnostics ([`models`]).
//!
//! Everything is pure `f64` math over `alloc`; the crate is `no_std`. IO,
//! serialization and the command line live in the companion `torsion-cli`
//! crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod comb;
pub mod complexes;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oddsig;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

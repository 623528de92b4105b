//! Exact-arithmetic laboratory for cardinal comparisons without choice.
//!
//! The crate is organised around the objects the constructions manipulate:
//!
//! - [`ordinals`]: Cantor normal form notations below epsilon-zero and a
//!   canonical bijection between notations and the naturals.
//! - [`encodings`]: bijections between the naturals and their finite subsets,
//!   finite sequences and injective sequences, lifted to the carrier of any
//!   infinite notation, plus an executable Cantor-Bernstein combinator.
//! - [`starcount`]: the injective-sequence count `n*` and the 2-adic facts
//!   about it.
//! - [`mostowski`]: finitely supported subsets of the rational line, their
//!   coherent indexing and the maps built on it.
//! - [`hereditary`]: finite levels of the layered permutation model built
//!   from sequences of atoms.
//! - [`specker`]: diagonalization engines driven by finite bijection oracles.
//! - [`selftest`]: the acceptance criteria, runnable from the CLI and tests.

pub mod cli;
pub mod encodings;
pub mod hereditary;
pub mod mostowski;
pub mod ordinals;
pub mod selftest;
pub mod specker;
pub mod starcount;

pub use num_bigint::BigUint;

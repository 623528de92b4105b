//! Finite fragment of the permutation model over a dense order of atoms.
//!
//! Atoms are exact rationals. A [`SymSet`] is a finite union of points and
//! open intervals with atom endpoints: its support plus one membership bit
//! per support atom and per gap.

mod automorphism;
mod cofinite;
mod indexing;
mod seq_a;
mod symset;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use automorphism::{separating_automorphism, Piece, PlAutomorphism};
pub use cofinite::{cofinite_compose, cofinite_decompose, CofinSet, Decomposition};
pub use indexing::{
    canonical_family, check_fin_onto, enumerate_with_support, fin_map, fin_preimage, pattern_count,
    pattern_rank, pattern_unrank, rank, unrank,
};
pub use seq_a::{
    check_inequality, check_seq_a_injective, default_a24, inequality_holds, nth_permutation, seq_a,
};
pub use symset::SymSet;

pub type Atom = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MostowskiError {
    #[error("bad atom {0:?}: expected an integer or p/q")]
    BadAtom(String),
    #[error("support must be strictly ascending")]
    UnsortedSupport,
    #[error("pattern has {got} bits, expected {expected}")]
    PatternLength { expected: usize, got: usize },
    #[error("bad pattern {0:?}: expected a string of 0 and 1")]
    BadPattern(String),
    #[error("support of the set is not contained in E (missing {0})")]
    NotInSupport(String),
    #[error("index {index} out of range for {count} sets")]
    IndexOutOfRange { index: String, count: String },
    #[error("the reference set must have 24 distinct atoms, got {0}")]
    BadReference(usize),
    #[error("{c} and {b} lie in different gaps of E")]
    DifferentGaps { c: String, b: String },
    #[error("{0} belongs to E")]
    InSupport(String),
    #[error("not an order automorphism: {0}")]
    NotMonotone(String),
}

pub fn atom(n: i64) -> Atom {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q`.
pub fn parse_atom(s: &str) -> Result<Atom, MostowskiError> {
    let bad = || MostowskiError::BadAtom(s.to_string());
    let t = s.trim();
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Always `p/q` in lowest terms.
pub fn format_atom(a: &Atom) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

//! Bijections between the naturals and finite structures over them.
//!
//! - finite sets: binary expansion;
//! - sequences: `<> -> 0`, `s ++ [a] -> pair(code(s), a) + 1` with the
//!   Cantor pairing `pair(a, b) = (a+b)(a+b+1)/2 + b`;
//! - injective sequences: reduced to arbitrary sequences by replacing each
//!   entry with its rank among the naturals not used earlier.
//!
//! [`lift`] carries these to the elements below any infinite notation and
//! [`cantor_bernstein`] builds a bijection from a pair of injections.

pub mod cantor_bernstein;
pub mod lift;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use cantor_bernstein::{cantor_bernstein, chase, Bijection, CbError};
pub use lift::{lift, Carrier, Direction, LiftValue, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodingError {
    #[error("not injective: entry {position} repeats value {value}")]
    NotInjective { position: usize, value: BigUint },
    #[error("set elements must be strictly increasing (position {position})")]
    NotIncreasing { position: usize },
    #[error("lifting requires an infinite ordinal")]
    FiniteOrdinal,
    #[error("{value} is not below {bound}")]
    NotBelow { value: String, bound: String },
    #[error("carrier scan exceeded {limit} notations")]
    ScanLimit { limit: u64 },
    #[error("set element {0} is too large to encode")]
    TooLarge(BigUint),
}

/// Code of a finite set given in increasing order.
pub fn fin_encode(set: &[u64]) -> Result<BigUint, EncodingError> {
    let mut n = BigUint::zero();
    for (position, &e) in set.iter().enumerate() {
        if position > 0 && set[position - 1] >= e {
            return Err(EncodingError::NotIncreasing { position });
        }
        n.set_bit(e, true);
    }
    Ok(n)
}

/// Set bits of `n`, ascending.
pub fn fin_decode(n: &BigUint) -> Vec<u64> {
    (0..n.bits()).filter(|&i| n.bit(i)).collect()
}

pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    ((&s * (&s + 1u32)) >> 1) + b
}

pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    let disc: BigUint = (z << 3) + 1u32;
    let w: BigUint = (disc.sqrt() - 1u32) >> 1;
    let t = (&w * (&w + 1u32)) >> 1;
    let b = z - t;
    let a = w - &b;
    (a, b)
}

pub fn seq_encode(seq: &[BigUint]) -> BigUint {
    seq.iter()
        .fold(BigUint::zero(), |code, a| pair(&code, a) + 1u32)
}

pub fn seq_decode(n: &BigUint) -> Vec<BigUint> {
    let mut out = Vec::new();
    let mut code = n.clone();
    while !code.is_zero() {
        let (rest, last) = unpair(&(code - 1u32));
        out.push(last);
        code = rest;
    }
    out.reverse();
    out
}

/// Replaces each entry by its rank among the naturals not used earlier.
pub fn inj_reduce(seq: &[BigUint]) -> Result<Vec<BigUint>, EncodingError> {
    let mut out = Vec::with_capacity(seq.len());
    for (i, a) in seq.iter().enumerate() {
        let mut below = 0usize;
        for earlier in &seq[..i] {
            if earlier == a {
                return Err(EncodingError::NotInjective {
                    position: i,
                    value: a.clone(),
                });
            }
            if earlier < a {
                below += 1;
            }
        }
        out.push(a - BigUint::from(below));
    }
    Ok(out)
}

/// Inverse of [`inj_reduce`]: entry `b` becomes the `(b+1)`-th natural not
/// among the earlier outputs.
pub fn inj_expand(seq: &[BigUint]) -> Vec<BigUint> {
    let mut used: Vec<BigUint> = Vec::with_capacity(seq.len());
    let mut out = Vec::with_capacity(seq.len());
    for b in seq {
        let mut v = b.clone();
        for u in &used {
            if *u <= v {
                v += 1u32;
            } else {
                break;
            }
        }
        let at = used.partition_point(|u| *u < v);
        used.insert(at, v.clone());
        out.push(v);
    }
    out
}

pub fn injseq_encode(seq: &[BigUint]) -> Result<BigUint, EncodingError> {
    Ok(seq_encode(&inj_reduce(seq)?))
}

pub fn injseq_decode(n: &BigUint) -> Vec<BigUint> {
    inj_expand(&seq_decode(n))
}

pub(crate) fn to_u64(n: &BigUint) -> Result<u64, EncodingError> {
    n.to_u64().ok_or_else(|| EncodingError::TooLarge(n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use proptest::prelude::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    /// Independent inverse: the `(b+1)`-th unused natural by linear search.
    fn expand_by_search(seq: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = Vec::new();
        for &b in seq {
            let mut skipped = 0;
            let mut v = 0;
            loop {
                if !out.contains(&v) {
                    if skipped == b {
                        break;
                    }
                    skipped += 1;
                }
                v += 1;
            }
            out.push(v);
        }
        out
    }

    #[test]
    fn fin_examples() {
        assert!(fin_decode(&BigUint::zero()).is_empty());
        assert_eq!(fin_decode(&BigUint::from(5u32)), vec![0, 2]);
        assert_eq!(fin_encode(&[1, 3]).unwrap(), BigUint::from(10u32));
        assert_eq!(
            fin_encode(&[3, 1]),
            Err(EncodingError::NotIncreasing { position: 1 })
        );
    }

    #[test]
    fn seq_examples() {
        assert!(seq_encode(&[]).is_zero());
        assert_eq!(seq_encode(&big(&[0])), BigUint::one());
        let s = big(&[4, 4, 0]);
        assert_eq!(seq_decode(&seq_encode(&s)), s);
        // pair is the Cantor diagonal walk
        let mut z = 0u32;
        for d in 0u32..20 {
            for b in 0..=d {
                let (a, bb) = (BigUint::from(d - b), BigUint::from(b));
                assert_eq!(pair(&a, &bb), BigUint::from(z));
                assert_eq!(unpair(&BigUint::from(z)), (a, bb));
                z += 1;
            }
        }
    }

    #[test]
    fn inj_examples() {
        assert_eq!(inj_reduce(&big(&[3, 0, 1])).unwrap(), big(&[3, 0, 0]));
        assert_eq!(inj_expand(&big(&[3, 0, 0])), big(&[3, 0, 1]));
        assert!(inj_reduce(&[]).unwrap().is_empty());
        assert_eq!(
            inj_reduce(&big(&[2, 5, 2, 5])),
            Err(EncodingError::NotInjective {
                position: 2,
                value: BigUint::from(2u32)
            })
        );
    }

    #[test]
    fn codecs_round_trip_on_prefix() {
        for n in 0u32..100_000 {
            let n = BigUint::from(n);
            let f: Vec<u64> = fin_decode(&n);
            assert_eq!(fin_encode(&f).unwrap(), n);
            assert_eq!(seq_encode(&seq_decode(&n)), n);
            assert_eq!(injseq_encode(&injseq_decode(&n)).unwrap(), n);
        }
    }

    #[test]
    fn codecs_round_trip_on_small_structures() {
        // Every sequence with entries < 40 and length <= 4.
        for len in 0..=4u32 {
            for mut k in 0..40u64.pow(len) {
                let mut s = Vec::with_capacity(len as usize);
                for _ in 0..len {
                    s.push(k % 40);
                    k /= 40;
                }
                let b = big(&s);
                assert_eq!(seq_decode(&seq_encode(&b)), b);
                let mut sorted = s.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() == s.len() {
                    assert_eq!(injseq_decode(&injseq_encode(&b).unwrap()), b);
                    if s.windows(2).all(|w| w[0] < w[1]) {
                        assert_eq!(fin_decode(&fin_encode(&s).unwrap()), s);
                    }
                }
            }
        }
    }

    #[test]
    fn expand_matches_search_and_reduce_inverts() {
        fn all(len: usize) -> Vec<Vec<u64>> {
            if len == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for s in all(len - 1) {
                for v in 0..8 {
                    let mut t = s.clone();
                    t.push(v);
                    out.push(t);
                }
            }
            out
        }
        for len in 0..=5 {
            for s in all(len) {
                let e = inj_expand(&big(&s));
                assert_eq!(e, big(&expand_by_search(&s)));
                assert_eq!(inj_reduce(&e).unwrap(), big(&s));
            }
        }
    }

    proptest! {
        #[test]
        fn expand_is_injective(seq in prop::collection::vec(0u64..1000, 0..12)) {
            let e = inj_expand(&big(&seq));
            let mut d = e.clone();
            d.sort();
            d.dedup();
            prop_assert_eq!(d.len(), e.len());
        }

        #[test]
        fn seq_round_trip_big(n in any::<u128>()) {
            let n = BigUint::from(n);
            prop_assert_eq!(seq_encode(&seq_decode(&n)), n);
        }
    }
}

//! Codecs over the elements below an infinite notation.
//!
//! The elements below `alpha` are listed in enumeration order of
//! [`nat_index`]; `element(i)` is the `i`-th of them and `position` inverts
//! it. A codec over the naturals then transfers as
//! `element . codec . position`.

use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{
    fin_decode, fin_encode, injseq_decode, injseq_encode, seq_decode, seq_encode, to_u64,
    EncodingError,
};
use crate::ordinals::{nat_index, unindex, Ordinal};

pub const DEFAULT_SCAN_LIMIT: u64 = 5_000_000;

/// The elements below an infinite notation, enumerated lazily.
pub struct Carrier {
    bound: Ordinal,
    scan_limit: u64,
    state: Mutex<Scan>,
}

#[derive(Default)]
struct Scan {
    /// Next enumeration index to examine.
    next: u64,
    /// Elements below the bound found so far, with their indices.
    found: Vec<(u64, Ordinal)>,
}

impl Carrier {
    pub fn new(bound: Ordinal) -> Result<Self, EncodingError> {
        Self::with_scan_limit(bound, DEFAULT_SCAN_LIMIT)
    }

    pub fn with_scan_limit(bound: Ordinal, scan_limit: u64) -> Result<Self, EncodingError> {
        if bound.is_finite() {
            return Err(EncodingError::FiniteOrdinal);
        }
        Ok(Carrier {
            bound,
            scan_limit,
            state: Mutex::new(Scan::default()),
        })
    }

    pub fn bound(&self) -> &Ordinal {
        &self.bound
    }

    fn scan_while(&self, mut more: impl FnMut(&Scan) -> bool) -> Result<(), EncodingError> {
        let mut scan = self.state.lock().unwrap();
        while more(&scan) {
            if scan.next >= self.scan_limit {
                return Err(EncodingError::ScanLimit {
                    limit: self.scan_limit,
                });
            }
            let idx = scan.next;
            let o = unindex(&BigUint::from(idx));
            if o < self.bound {
                scan.found.push((idx, o));
            }
            scan.next += 1;
        }
        Ok(())
    }

    /// The `i`-th element below the bound.
    pub fn element(&self, i: u64) -> Result<Ordinal, EncodingError> {
        let i = i as usize;
        self.scan_while(|s| s.found.len() <= i)?;
        Ok(self.state.lock().unwrap().found[i].1.clone())
    }

    /// Inverse of [`Carrier::element`].
    pub fn position(&self, value: &Ordinal) -> Result<u64, EncodingError> {
        if *value >= self.bound {
            return Err(EncodingError::NotBelow {
                value: value.to_string(),
                bound: self.bound.to_string(),
            });
        }
        let idx = nat_index(value).to_u64().ok_or(EncodingError::ScanLimit {
            limit: self.scan_limit,
        })?;
        self.scan_while(|s| s.next <= idx)?;
        let scan = self.state.lock().unwrap();
        let at = scan.found.partition_point(|(i, _)| *i < idx);
        Ok(at as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    /// Finite subsets.
    Fin,
    /// Finite sequences.
    Seq,
    /// Finite injective sequences.
    #[serde(rename = "Seq")]
    InjSeq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Element to structure.
    Decode,
    /// Structure to element.
    Encode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LiftValue {
    Element(Ordinal),
    Elements(Vec<Ordinal>),
}

fn positions(carrier: &Carrier, items: &[Ordinal]) -> Result<Vec<u64>, EncodingError> {
    items.iter().map(|o| carrier.position(o)).collect()
}

fn elements(carrier: &Carrier, idx: &[BigUint]) -> Result<Vec<Ordinal>, EncodingError> {
    idx.iter().map(|i| carrier.element(to_u64(i)?)).collect()
}

/// Applies the transferred codec for `which` in the given direction.
/// Finite sets are given and returned in increasing order of position.
pub fn lift(
    carrier: &Carrier,
    which: Structure,
    direction: Direction,
    value: &LiftValue,
) -> Result<LiftValue, EncodingError> {
    match (direction, value) {
        (Direction::Decode, LiftValue::Element(x)) => {
            let code = BigUint::from(carrier.position(x)?);
            let idx: Vec<BigUint> = match which {
                Structure::Fin => fin_decode(&code).into_iter().map(BigUint::from).collect(),
                Structure::Seq => seq_decode(&code),
                Structure::InjSeq => injseq_decode(&code),
            };
            Ok(LiftValue::Elements(elements(carrier, &idx)?))
        }
        (Direction::Encode, LiftValue::Elements(items)) => {
            let pos = positions(carrier, items)?;
            let code = match which {
                Structure::Fin => {
                    let mut sorted = pos.clone();
                    sorted.sort_unstable();
                    if let Some(w) = sorted.windows(2).position(|w| w[0] == w[1]) {
                        return Err(EncodingError::NotInjective {
                            position: w + 1,
                            value: BigUint::from(sorted[w]),
                        });
                    }
                    fin_encode(&sorted)?
                }
                Structure::Seq => {
                    seq_encode(&pos.iter().map(|&p| BigUint::from(p)).collect::<Vec<_>>())
                }
                Structure::InjSeq => {
                    injseq_encode(&pos.iter().map(|&p| BigUint::from(p)).collect::<Vec<_>>())?
                }
            };
            Ok(LiftValue::Element(carrier.element(to_u64(&code)?)?))
        }
        (Direction::Decode, LiftValue::Elements(_))
        | (Direction::Encode, LiftValue::Element(_)) => Err(EncodingError::NotBelow {
            value: "a value of the wrong shape".into(),
            bound: carrier.bound.to_string(),
        }),
    }
}

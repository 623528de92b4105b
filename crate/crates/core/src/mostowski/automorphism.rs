use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_atom, parse_atom, Atom, MostowskiError, SymSet};

/// `q -> slope * q + offset` for `q >= from` (up to the next piece).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    /// `None` for the leftmost piece.
    pub from: Option<Atom>,
    pub slope: Atom,
    pub offset: Atom,
}

impl Piece {
    fn eval(&self, q: &Atom) -> Atom {
        &self.slope * q + &self.offset
    }
}

/// A continuous, piecewise-affine increasing bijection of the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlAutomorphism {
    pieces: Vec<Piece>,
}

impl PlAutomorphism {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, MostowskiError> {
        let bad = |m: &str| Err(MostowskiError::NotMonotone(m.to_string()));
        match pieces.first() {
            Some(p) if p.from.is_none() => {}
            _ => return bad("the first piece must start at -inf"),
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.slope <= Atom::zero() {
                return bad("slopes must be positive");
            }
            if i > 0 {
                let Some(b) = &p.from else {
                    return bad("only the first piece may start at -inf");
                };
                if let Some(prev_b) = &pieces[i - 1].from {
                    if prev_b >= b {
                        return bad("breakpoints must increase");
                    }
                }
                if pieces[i - 1].eval(b) != p.eval(b) {
                    return bad("pieces must agree at breakpoints");
                }
            }
        }
        Ok(PlAutomorphism { pieces })
    }

    pub fn identity() -> Self {
        Self::translation(Atom::zero())
    }

    pub fn translation(by: Atom) -> Self {
        PlAutomorphism {
            pieces: vec![Piece {
                from: None,
                slope: Atom::one(),
                offset: by,
            }],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn piece_for(&self, q: &Atom) -> &Piece {
        let i = self
            .pieces
            .partition_point(|p| p.from.as_ref().is_none_or(|b| b <= q));
        &self.pieces[i - 1]
    }

    pub fn apply(&self, q: &Atom) -> Atom {
        self.piece_for(q).eval(q)
    }

    pub fn inverse(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                from: p.from.as_ref().map(|b| p.eval(b)),
                slope: p.slope.recip(),
                offset: -&p.offset / &p.slope,
            })
            .collect();
        PlAutomorphism { pieces }
    }

    /// Moves the support pointwise; the pattern is unchanged because the
    /// map preserves order.
    pub fn act(&self, x: &SymSet) -> SymSet {
        x.map_support(|a| self.apply(a))
    }

    pub fn fixes(&self, atoms: &[Atom]) -> bool {
        atoms.iter().all(|a| self.apply(a) == *a)
    }
}

/// Affine piece from `[a0, a1]` onto `[b0, b1]`, starting at `a0`.
fn stretch(a0: &Atom, a1: &Atom, b0: &Atom, b1: &Atom) -> Piece {
    let slope = (b1 - b0) / (a1 - a0);
    let offset = b0 - &slope * a0;
    Piece {
        from: Some(a0.clone()),
        slope,
        offset,
    }
}

fn shift_from(from: Option<Atom>, by: Atom) -> Piece {
    Piece {
        from,
        slope: Atom::one(),
        offset: by,
    }
}

/// An automorphism fixing `e` pointwise and sending `c` to `b`; both must
/// avoid `e` and lie in the same gap of it.
pub fn separating_automorphism(
    e: &[Atom],
    c: &Atom,
    b: &Atom,
) -> Result<PlAutomorphism, MostowskiError> {
    let mut e = e.to_vec();
    e.sort();
    e.dedup();
    for q in [c, b] {
        if e.binary_search(q).is_ok() {
            return Err(MostowskiError::InSupport(format_atom(q)));
        }
    }
    let gap = |q: &Atom| e.partition_point(|a| a < q);
    if gap(c) != gap(b) {
        return Err(MostowskiError::DifferentGaps {
            c: format_atom(c),
            b: format_atom(b),
        });
    }
    if c == b {
        return Ok(PlAutomorphism::identity());
    }
    let g = gap(c);
    let lo = g.checked_sub(1).map(|i| e[i].clone());
    let hi = e.get(g).cloned();
    let fixed = |from: Option<Atom>| shift_from(from, Atom::zero());
    let pieces = match (lo, hi) {
        (None, None) => vec![shift_from(None, b - c)],
        (Some(lo), None) => vec![
            fixed(None),
            stretch(&lo, c, &lo, b),
            shift_from(Some(c.clone()), b - c),
        ],
        (None, Some(hi)) => vec![
            shift_from(None, b - c),
            stretch(c, &hi, b, &hi),
            fixed(Some(hi)),
        ],
        (Some(lo), Some(hi)) => vec![
            fixed(None),
            stretch(&lo, c, &lo, b),
            stretch(c, &hi, b, &hi),
            fixed(Some(hi)),
        ],
    };
    PlAutomorphism::new(pieces)
}

#[derive(Serialize, Deserialize)]
struct PieceRepr {
    from: String,
    slope: String,
    offset: String,
}

impl Serialize for PlAutomorphism {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<PieceRepr> = self
            .pieces
            .iter()
            .map(|p| PieceRepr {
                from: p
                    .from
                    .as_ref()
                    .map_or_else(|| "-inf".to_string(), format_atom),
                slope: format_atom(&p.slope),
                offset: format_atom(&p.offset),
            })
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PlAutomorphism {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let v = Vec::<PieceRepr>::deserialize(d)?;
        let pieces = v
            .iter()
            .map(|p| {
                let from = if p.from == "-inf" {
                    None
                } else {
                    Some(parse_atom(&p.from)?)
                };
                Ok(Piece {
                    from,
                    slope: parse_atom(&p.slope)?,
                    offset: parse_atom(&p.offset)?,
                })
            })
            .collect::<Result<Vec<_>, MostowskiError>>()
            .map_err(D::Error::custom)?;
        PlAutomorphism::new(pieces).map_err(D::Error::custom)
    }
}

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_atom, parse_atom, Atom, MostowskiError};

/// A finitely supported subset of the atoms.
///
/// `pattern` has `2n+1` bits laid out as
/// `[gap_0, atom_0, gap_1, atom_1, ..., atom_{n-1}, gap_n]`, where `gap_0`
/// is the left-unbounded interval and `gap_n` the right-unbounded one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymSet {
    support: Vec<Atom>,
    pattern: Vec<bool>,
}

impl SymSet {
    pub fn new(support: Vec<Atom>, pattern: Vec<bool>) -> Result<Self, MostowskiError> {
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MostowskiError::UnsortedSupport);
        }
        if pattern.len() != 2 * support.len() + 1 {
            return Err(MostowskiError::PatternLength {
                expected: 2 * support.len() + 1,
                got: pattern.len(),
            });
        }
        Ok(SymSet { support, pattern })
    }

    /// Parses a pattern written as a string of `0` and `1`.
    pub fn from_bits(support: Vec<Atom>, bits: &str) -> Result<Self, MostowskiError> {
        let pattern = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(MostowskiError::BadPattern(bits.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(support, pattern)
    }

    pub fn empty() -> Self {
        SymSet {
            support: Vec::new(),
            pattern: vec![false],
        }
    }

    /// The whole atom line.
    pub fn full() -> Self {
        SymSet {
            support: Vec::new(),
            pattern: vec![true],
        }
    }

    pub fn support(&self) -> &[Atom] {
        &self.support
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn bits(&self) -> String {
        self.pattern
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn member(&self, q: &Atom) -> bool {
        match self.support.binary_search(q) {
            Ok(i) => self.pattern[2 * i + 1],
            Err(gap) => self.pattern[2 * gap],
        }
    }

    fn removable(&self, i: usize) -> bool {
        let p = &self.pattern;
        p[2 * i] == p[2 * i + 1] && p[2 * i + 1] == p[2 * i + 2]
    }

    pub fn is_canonical(&self) -> bool {
        (0..self.support.len()).all(|i| !self.removable(i))
    }

    /// Drops every removable atom; the result carries the least support.
    pub fn canonicalize(&self) -> SymSet {
        let mut support = Vec::with_capacity(self.support.len());
        let mut pattern = vec![self.pattern[0]];
        for (i, a) in self.support.iter().enumerate() {
            if self.removable(i) {
                continue;
            }
            support.push(a.clone());
            pattern.push(self.pattern[2 * i + 1]);
            pattern.push(self.pattern[2 * i + 2]);
        }
        SymSet { support, pattern }
    }

    /// Same set written over a larger support.
    pub fn refine(&self, extra: &Atom) -> SymSet {
        match self.support.binary_search(extra) {
            Ok(_) => self.clone(),
            Err(gap) => {
                let mut support = self.support.clone();
                support.insert(gap, extra.clone());
                let mut pattern = self.pattern.clone();
                let g = self.pattern[2 * gap];
                pattern.splice(2 * gap + 1..2 * gap + 1, [g, g]);
                SymSet { support, pattern }
            }
        }
    }

    pub(crate) fn map_support(&self, f: impl Fn(&Atom) -> Atom) -> SymSet {
        SymSet {
            support: self.support.iter().map(f).collect(),
            pattern: self.pattern.clone(),
        }
    }
}

impl fmt::Display for SymSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self.support.iter().map(format_atom).collect();
        write!(f, "{{{}}}:{}", atoms.join(","), self.bits())
    }
}

#[derive(Serialize, Deserialize)]
struct Repr {
    support: Vec<String>,
    pattern: String,
}

impl Serialize for SymSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr {
            support: self.support.iter().map(format_atom).collect(),
            pattern: self.bits(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = Repr::deserialize(d)?;
        let support = r
            .support
            .iter()
            .map(|a| parse_atom(a))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        SymSet::from_bits(support, &r.pattern).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::super::atom;
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn half(n: i64) -> Atom {
        BigRational::new(n.into(), 2.into())
    }

    #[test]
    fn pattern_semantics() {
        let x = SymSet::from_bits(vec![atom(0)], "100").unwrap();
        assert!(x.member(&atom(-1)));
        assert!(!x.member(&atom(0)));
        assert!(!x.member(&half(7)));
    }

    #[test]
    fn canonical_forms() {
        let all = SymSet::from_bits(vec![atom(1), atom(2)], "11111").unwrap();
        assert_eq!(all.canonicalize(), SymSet::full());
        let x = SymSet::from_bits(vec![atom(0)], "100").unwrap();
        let padded = x.refine(&atom(5));
        assert_eq!(padded.bits(), "10000");
        assert_eq!(padded.canonicalize(), x);
        assert_eq!(x.canonicalize(), x);
        for k in -4..16 {
            assert_eq!(padded.member(&half(k)), x.member(&half(k)));
        }
    }

    #[test]
    fn json_shape() {
        let x = SymSet::from_bits(vec![atom(0), half(7)], "10010").unwrap();
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"support": ["0/1", "7/2"], "pattern": "10010"})
        );
        let back: SymSet = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_value::<SymSet>(
            serde_json::json!({"support": ["1"], "pattern": "10"})
        )
        .is_err());
    }

    fn arb_symset() -> impl Strategy<Value = SymSet> {
        prop::collection::btree_set(-20i64..20, 0..=5).prop_flat_map(|atoms| {
            let n = atoms.len();
            prop::collection::vec(any::<bool>(), 2 * n + 1).prop_map(move |bits| {
                SymSet::new(atoms.iter().map(|&a| atom(a)).collect(), bits).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn constant_on_gaps(x in arb_symset()) {
            let s = x.support().to_vec();
            let mut bounds: Vec<Option<Atom>> = vec![None];
            bounds.extend(s.iter().cloned().map(Some));
            bounds.push(None);
            for g in 0..=s.len() {
                let (lo, hi) = (&bounds[g], &bounds[g + 1]);
                let samples: Vec<Atom> = match (lo, hi) {
                    (Some(l), Some(h)) => {
                        let d = h - l;
                        [1, 2, 3].iter().map(|&k| l + &d * BigRational::new(k.into(), 4.into())).collect()
                    }
                    (Some(l), None) => [1, 2, 100].iter().map(|&k| l + atom(k)).collect(),
                    (None, Some(h)) => [1, 2, 100].iter().map(|&k| h - atom(k)).collect(),
                    (None, None) => vec![atom(-7), atom(0), atom(7)],
                };
                for q in &samples {
                    prop_assert_eq!(x.member(q), x.pattern()[2 * g]);
                }
            }
        }

        #[test]
        fn canonicalize_preserves_membership(x in arb_symset()) {
            let c = x.canonicalize();
            prop_assert!(c.is_canonical());
            prop_assert_eq!(c.canonicalize(), c.clone());
            for k in -45..45 {
                let q = half(k);
                prop_assert_eq!(c.member(&q), x.member(&q));
            }
        }
    }
}

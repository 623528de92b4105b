//! Subsets of `k x A` whose rows are finite or cofinite, split into a flag
//! per row and one finite set.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

/// A finite set of atoms, or the complement of one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CofinSet<T: Ord> {
    pub core: BTreeSet<T>,
    pub cofinite: bool,
}

impl<T: Ord> CofinSet<T> {
    pub fn finite(core: impl IntoIterator<Item = T>) -> Self {
        CofinSet {
            core: core.into_iter().collect(),
            cofinite: false,
        }
    }

    pub fn cofinite(missing: impl IntoIterator<Item = T>) -> Self {
        CofinSet {
            core: missing.into_iter().collect(),
            cofinite: true,
        }
    }

    pub fn contains(&self, a: &T) -> bool {
        self.core.contains(a) != self.cofinite
    }
}

/// One flag per row (set for cofinite rows) and the finite set of
/// `(row, atom)` pairs where the subset differs from the flagged full rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition<T: Ord> {
    pub flags: Vec<bool>,
    pub finite: BTreeSet<(usize, T)>,
}

impl<T: Ord> Decomposition<T> {
    /// Flags as a string, row 0 first.
    pub fn flag_string(&self) -> String {
        self.flags
            .iter()
            .map(|&f| if f { '1' } else { '0' })
            .collect()
    }
}

impl<T: Ord + Serialize> Serialize for Decomposition<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a, T> {
            flags: String,
            finite: Vec<&'a (usize, T)>,
        }
        Repr {
            flags: self.flag_string(),
            finite: self.finite.iter().collect(),
        }
        .serialize(s)
    }
}

pub fn cofinite_decompose<T: Ord + Clone>(rows: &[CofinSet<T>]) -> Decomposition<T> {
    let flags = rows.iter().map(|r| r.cofinite).collect();
    let finite = rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.core.iter().map(move |a| (i, a.clone())))
        .collect();
    Decomposition { flags, finite }
}

pub fn cofinite_compose<T: Ord + Clone>(d: &Decomposition<T>) -> Vec<CofinSet<T>> {
    d.flags
        .iter()
        .enumerate()
        .map(|(i, &cofinite)| CofinSet {
            core: d
                .finite
                .iter()
                .filter(|(r, _)| *r == i)
                .map(|(_, a)| a.clone())
                .collect(),
            cofinite,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let d = cofinite_decompose(&[CofinSet::finite(['a', 'b'])]);
        assert_eq!(d.flag_string(), "0");
        assert_eq!(d.finite, BTreeSet::from([(0, 'a'), (0, 'b')]));
        let d = cofinite_decompose(&[CofinSet::cofinite(['a'])]);
        assert_eq!(d.flag_string(), "1");
        assert_eq!(d.finite, BTreeSet::from([(0, 'a')]));
        let d = cofinite_decompose(&[CofinSet::finite(['a']), CofinSet::cofinite(['b'])]);
        assert_eq!(d.flag_string(), "01");
        assert_eq!(d.finite, BTreeSet::from([(0, 'a'), (1, 'b')]));
        assert_eq!(
            serde_json::to_value(&d).unwrap(),
            serde_json::json!({"flags": "01", "finite": [[0, "a"], [1, "b"]]})
        );
    }

    #[test]
    fn round_trip_exhaustive() {
        // Rows over an 8-atom pool with cores of size <= 2, k <= 3.
        let mut cores: Vec<BTreeSet<u8>> = vec![BTreeSet::new()];
        for a in 0..8u8 {
            cores.push(BTreeSet::from([a]));
            for b in (a + 1)..8 {
                cores.push(BTreeSet::from([a, b]));
            }
        }
        let rows: Vec<CofinSet<u8>> = cores
            .iter()
            .flat_map(|c| {
                [false, true].map(|cofinite| CofinSet {
                    core: c.clone(),
                    cofinite,
                })
            })
            .collect();
        let mut checked = 0u64;
        for k in 1..=3u32 {
            let n = rows.len();
            for mut idx in 0..n.pow(k) {
                let mut x = Vec::new();
                for _ in 0..k {
                    x.push(rows[idx % n].clone());
                    idx /= n;
                }
                let d = cofinite_decompose(&x);
                assert_eq!(cofinite_compose(&d), x);
                for (i, row) in x.iter().enumerate() {
                    for a in 0..8u8 {
                        let in_finite = d.finite.contains(&(i, a));
                        assert_eq!(row.contains(&a), in_finite != d.flags[i]);
                    }
                }
                checked += 1;
            }
        }
        assert_eq!(checked, 74 + 74 * 74 + 74 * 74 * 74);
    }
}

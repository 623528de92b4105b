//! Indexing of the sets supported by a finite atom set `E`.
//!
//! Sets are ordered first by their least support, compared colexicographically
//! as subsets of `E` (the larger largest differing atom wins), then by the
//! canonical pattern read as a binary number with the left gap as the most
//! significant bit. Extending `E` by atoms above its maximum only appends
//! colex-larger supports, so ranks of sets supported below are unchanged.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use serde_json::json;

use super::{atom, format_atom, Atom, MostowskiError, SymSet};
use crate::starcount::{Report, Status};

fn pow3(k: usize) -> BigUint {
    BigUint::from(3u32).pow(k as u32)
}

/// Canonical patterns whose support has exactly `k` atoms: `2 * 3^k`.
pub fn pattern_count(k: usize) -> BigUint {
    pow3(k) * 2u32
}

/// Canonical completions of a pattern prefix for `k` atoms.
fn completions(prefix: &[bool], k: usize) -> BigUint {
    let len = prefix.len();
    // Every atom whose right gap is fixed must be non-removable.
    for i in 0..k {
        if 2 * i + 2 < len
            && prefix[2 * i] == prefix[2 * i + 1]
            && prefix[2 * i + 1] == prefix[2 * i + 2]
        {
            return BigUint::zero();
        }
    }
    if len == 0 {
        return pattern_count(k);
    }
    if len % 2 == 1 {
        return pow3(k - (len - 1) / 2);
    }
    // Prefix ends on an atom bit; its right gap is constrained.
    let choices: u32 = if prefix[len - 1] == prefix[len - 2] {
        1
    } else {
        2
    };
    pow3(k - len / 2) * choices
}

/// Position of a canonical pattern among all canonical patterns with the
/// same number of atoms.
pub fn pattern_rank(pattern: &[bool]) -> BigUint {
    let k = (pattern.len() - 1) / 2;
    let mut rank = BigUint::zero();
    let mut prefix = Vec::with_capacity(pattern.len());
    for &bit in pattern {
        if bit {
            prefix.push(false);
            rank += completions(&prefix, k);
            prefix.pop();
        }
        prefix.push(bit);
    }
    rank
}

pub fn pattern_unrank(k: usize, mut index: BigUint) -> Vec<bool> {
    let mut prefix = Vec::with_capacity(2 * k + 1);
    for _ in 0..2 * k + 1 {
        prefix.push(false);
        let zeros = completions(&prefix, k);
        if index >= zeros {
            index -= zeros;
            *prefix.last_mut().unwrap() = true;
        }
    }
    prefix
}

/// Number of sets ordered before everything whose support contains the
/// position `p` as its largest differing element, given `above` chosen
/// positions higher up.
fn block(p: usize, above: usize) -> BigUint {
    pattern_count(above) << (2 * p)
}

/// Index of `x` among the sets supported by `e` (ascending atoms).
pub fn rank(x: &SymSet, e: &[Atom]) -> Result<BigUint, MostowskiError> {
    let x = x.canonicalize();
    let mut positions = Vec::with_capacity(x.support().len());
    for a in x.support() {
        let p = e
            .binary_search(a)
            .map_err(|_| MostowskiError::NotInSupport(format_atom(a)))?;
        positions.push(p);
    }
    let mut r = BigUint::zero();
    for (i, &p) in positions.iter().enumerate() {
        let above = positions.len() - 1 - i;
        r += block(p, above);
    }
    Ok(r + pattern_rank(x.pattern()))
}

/// Inverse of [`rank`].
pub fn unrank(e: &[Atom], index: &BigUint) -> Result<SymSet, MostowskiError> {
    let total = BigUint::one() << (2 * e.len() + 1);
    if *index >= total {
        return Err(MostowskiError::IndexOutOfRange {
            index: index.to_string(),
            count: total.to_string(),
        });
    }
    let mut i = index.clone();
    let mut chosen = Vec::new();
    for p in (0..e.len()).rev() {
        let skip = block(p, chosen.len());
        if i >= skip {
            i -= skip;
            chosen.push(p);
        }
    }
    chosen.reverse();
    let support = chosen.iter().map(|&p| e[p].clone()).collect();
    let pattern = pattern_unrank(chosen.len(), i);
    SymSet::new(support, pattern)
}

/// All `2^(2|E|+1)` sets supported by `e`, in index order.
pub fn enumerate_with_support(e: &[Atom]) -> Vec<SymSet> {
    let total = 1u64 << (2 * e.len() + 1);
    (0..total)
        .map(|i| unrank(e, &BigUint::from(i)).expect("index in range"))
        .collect()
}

/// The `|E|`-th set supported by `E` (0-indexed).
pub fn fin_map(e: &[Atom]) -> SymSet {
    unrank(e, &BigUint::from(e.len())).expect("|E| < 2^(2|E|+1)")
}

/// A finite `E` with `fin_map(E) = x`: the support of `x` padded with
/// atoms above its maximum until `|E|` equals the rank of `x`.
pub fn fin_preimage(x: &SymSet) -> Vec<Atom> {
    let x = x.canonicalize();
    let support = x.support().to_vec();
    let r = rank(&x, &support).expect("own support");
    if support.is_empty() {
        return if r.is_zero() {
            Vec::new()
        } else {
            vec![atom(0)]
        };
    }
    let r: usize = r.try_into().expect("rank fits in memory");
    let top = support.last().unwrap().clone();
    let mut e = support;
    let mut k = 1;
    while e.len() < r {
        e.push(&top + atom(k));
        k += 1;
    }
    e
}

/// Every canonical set whose support is a subset of `atoms` with at most
/// `max_support` elements, by support then pattern index.
pub fn canonical_family(atoms: &[Atom], max_support: usize) -> Vec<SymSet> {
    let mut atoms = atoms.to_vec();
    atoms.sort();
    atoms.dedup();
    let mut supports: Vec<Vec<Atom>> = vec![vec![]];
    for a in &atoms {
        let grown: Vec<Vec<Atom>> = supports
            .iter()
            .filter(|s| s.len() < max_support)
            .map(|s| {
                let mut t = s.clone();
                t.push(a.clone());
                t
            })
            .collect();
        supports.extend(grown);
    }
    let mut out = Vec::new();
    for support in supports {
        let k = support.len();
        let mut i = BigUint::zero();
        while i < pattern_count(k) {
            let pattern = pattern_unrank(k, i.clone());
            out.push(SymSet::new(support.clone(), pattern).expect("ascending support"));
            i += 1u32;
        }
    }
    out
}

/// `fin_map(fin_preimage(x)) = x` for every set of [`canonical_family`].
pub fn check_fin_onto(atoms: &[Atom], max_support: usize) -> Report {
    let family = canonical_family(atoms, max_support);
    let bad = family.iter().find(|x| fin_map(&fin_preimage(x)) != **x);
    Report {
        claim: "every supported set is fin_map(E) for a finite E".into(),
        range: format!(
            "{} sets, support <= {max_support} from {} atoms",
            family.len(),
            atoms.len()
        ),
        status: if bad.is_some() {
            Status::Counterexample
        } else {
            Status::Holds
        },
        counterexample: bad.map(|x| json!({ "set": x })),
        details: Some(json!({ "sets": family.len() })),
    }
}

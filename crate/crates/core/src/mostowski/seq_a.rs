//! Injection of the supported sets into injective atom sequences.
//!
//! With `l` the pattern index of `y` among sets of the same least support:
//! a support of at least 12 atoms is output as its `l`-th permutation; a
//! smaller one is replaced by `D = supp(y) xor A24` (at least 13 atoms) and
//! output as the `(|D|! - l - 1)`-th permutation of `D`. Permutations are
//! numbered lexicographically from the ascending one.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::json;

use super::{atom, canonical_family, indexing::pattern_rank, Atom, MostowskiError, SymSet};
use crate::starcount::{Report, Status};

pub const LARGE_SUPPORT: usize = 12;

pub fn default_a24() -> Vec<Atom> {
    (0..24).map(atom).collect()
}

fn factorial(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

/// The `index`-th permutation (lexicographic, 0-based) of ascending `items`.
pub fn nth_permutation<T: Clone>(items: &[T], index: &BigUint) -> Vec<T> {
    let mut pool: Vec<T> = items.to_vec();
    let mut rest = index % factorial(items.len());
    let mut out = Vec::with_capacity(items.len());
    for k in (0..items.len()).rev() {
        let f = factorial(k);
        let digit: usize = (&rest / &f).try_into().expect("digit below pool size");
        rest %= &f;
        out.push(pool.remove(digit));
    }
    out
}

pub fn seq_a(y: &SymSet, a24: &[Atom]) -> Result<Vec<Atom>, MostowskiError> {
    let mut reference = a24.to_vec();
    reference.sort();
    reference.dedup();
    if reference.len() != 24 || a24.len() != 24 {
        return Err(MostowskiError::BadReference(reference.len()));
    }
    let y = y.canonicalize();
    let l = pattern_rank(y.pattern());
    let support = y.support();
    if support.len() >= LARGE_SUPPORT {
        return Ok(nth_permutation(support, &l));
    }
    let d: Vec<Atom> = {
        let mut v: Vec<Atom> = support
            .iter()
            .filter(|a| reference.binary_search(a).is_err())
            .cloned()
            .collect();
        v.extend(
            reference
                .iter()
                .filter(|a| support.binary_search(a).is_err())
                .cloned(),
        );
        v.sort();
        v
    };
    let index = factorial(d.len()) - l - BigUint::one();
    Ok(nth_permutation(&d, &index))
}

/// `2 * 2^(2n+1) < n!`.
pub fn inequality_holds(n: u64) -> bool {
    (BigUint::one() << (2 * n + 2)) < factorial(n as usize)
}

/// [`inequality_holds`] for every `n` in `lo..=hi`.
pub fn check_inequality(lo: u64, hi: u64) -> Report {
    let failing: Vec<u64> = (lo..=hi).filter(|&n| !inequality_holds(n)).collect();
    Report {
        claim: "2*2^(2n+1) < n!".into(),
        range: format!("{lo}<=n<={hi}"),
        status: if failing.is_empty() {
            Status::Holds
        } else {
            Status::Counterexample
        },
        counterexample: failing.first().map(|n| json!({ "n": n })),
        details: Some(json!({ "failing": failing })),
    }
}

/// Pairwise distinct [`seq_a`] values over [`canonical_family`].
pub fn check_seq_a_injective(
    atoms: &[Atom],
    max_support: usize,
    a24: &[Atom],
) -> Result<Report, MostowskiError> {
    let family = canonical_family(atoms, max_support);
    let mut seen: HashMap<Vec<Atom>, &SymSet> = HashMap::new();
    let mut collision = None;
    for x in &family {
        if let Some(y) = seen.insert(seq_a(x, a24)?, x) {
            collision = Some(json!({ "sets": [y, x] }));
            break;
        }
    }
    Ok(Report {
        claim: "seq_a is injective".into(),
        range: format!(
            "{} sets, support <= {max_support} from {} atoms",
            family.len(),
            atoms.len()
        ),
        status: if collision.is_some() {
            Status::Counterexample
        } else {
            Status::Holds
        },
        counterexample: collision,
        details: Some(json!({ "sets": family.len() })),
    })
}

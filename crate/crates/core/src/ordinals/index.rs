//! A bijection between notations and naturals.
//!
//! Notations are listed by weight, then lexicographically. The weight of
//! `w^e0*k0 + ... ` is the sum over terms of `weight(e_i) + bits(k_i)`, with
//! `weight(0) = 0`. Within one weight a notation is read as a coefficient
//! vector indexed by exponents in enumeration order, and vectors compare
//! lexicographically with `0 < 1 < 2 < ...` in each coordinate.
//!
//! Counting uses generating functions. An exponent of weight `m` contributes
//! the factor `f_m = 1 + x^(m+1) / (1 - 2x)` (absent, or present with a
//! coefficient of some bit length), so the number of notations of weight `s`
//! is `[x^s]` of the product of `f_m^c(m)` over `m < s`.

use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Ordinal, Term};

/// Weight of a notation; every weight class is finite.
pub fn notation_size(a: &Ordinal) -> usize {
    a.terms()
        .iter()
        .map(|t| notation_size(&t.exponent) + t.coefficient.bits() as usize)
        .sum()
}

struct Tables {
    max_weight: usize,
    /// Number of notations of each weight.
    count: Vec<BigUint>,
    /// Index of the first notation of each weight.
    offset: Vec<BigUint>,
    /// `tail[m]`: coefficients of the product of `f_m'^c(m')` over `m' >= m`,
    /// truncated at `max_weight`.
    tail: Vec<Vec<BigUint>>,
}

static TABLES: RwLock<Option<Arc<Tables>>> = RwLock::new(None);

fn tables_for(weight: usize) -> Arc<Tables> {
    if let Some(t) = TABLES.read().unwrap().as_ref() {
        if t.max_weight >= weight {
            return t.clone();
        }
    }
    let mut guard = TABLES.write().unwrap();
    let current = match guard.as_ref() {
        Some(t) if t.max_weight >= weight => return t.clone(),
        Some(t) => t.max_weight,
        None => 0,
    };
    let target = weight.max(2 * current).max(16);
    let t = Arc::new(Tables::build(target));
    *guard = Some(t.clone());
    t
}

fn binomial(n: &BigUint, k: usize) -> BigUint {
    if *n < BigUint::from(k) {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// `[x^d] f_m^r`.
fn power_coeff(m: usize, r: &BigUint, d: usize) -> BigUint {
    if d == 0 {
        return BigUint::one();
    }
    let mut total = BigUint::zero();
    let mut t = 1;
    while t * (m + 1) <= d {
        let e = d - t * (m + 1);
        let ways = binomial(r, t);
        if ways.is_zero() {
            break;
        }
        total += (ways * binomial(&BigUint::from(e + t - 1), t - 1)) << e;
        t += 1;
    }
    total
}

fn mul_truncated(a: &[BigUint], b: &[BigUint], len: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

impl Tables {
    fn build(max_weight: usize) -> Self {
        let len = max_weight + 1;
        let mut count = Vec::with_capacity(len);
        let mut factors = Vec::with_capacity(len);
        let mut head = vec![BigUint::zero(); len];
        head[0] = BigUint::one();
        for m in 0..len {
            // Factors for weights below m only reach degree m through
            // exponents of smaller weight, so this coefficient is final.
            let c = head[m].clone();
            let factor: Vec<BigUint> = (0..len).map(|d| power_coeff(m, &c, d)).collect();
            head = mul_truncated(&head, &factor, len);
            factors.push(factor);
            count.push(c);
        }
        let mut offset = Vec::with_capacity(len + 1);
        let mut acc = BigUint::zero();
        for c in &count {
            offset.push(acc.clone());
            acc += c;
        }
        offset.push(acc);
        let mut tail = vec![Vec::new(); len + 1];
        let mut unit = vec![BigUint::zero(); len];
        unit[0] = BigUint::one();
        tail[len] = unit;
        for m in (0..len).rev() {
            tail[m] = mul_truncated(&tail[m + 1], &factors[m], len);
        }
        Tables {
            max_weight,
            count,
            offset,
            tail,
        }
    }

    /// Completions of weight `w` using `r` remaining exponents of weight `m`
    /// and any exponents of larger weight.
    fn completions(&self, m: usize, r: &BigUint, w: usize) -> BigUint {
        let rest = &self.tail[m + 1];
        let mut total = rest[w].clone();
        for d in (m + 1)..=w {
            let c = power_coeff(m, r, d);
            if !c.is_zero() {
                total += c * &rest[w - d];
            }
        }
        total
    }
}

/// Position of a notation in the enumeration.
pub fn nat_index(a: &Ordinal) -> BigUint {
    let weight = notation_size(a);
    let tables = tables_for(weight);
    nat_index_with(&tables, a, weight)
}

fn nat_index_with(tables: &Tables, a: &Ordinal, weight: usize) -> BigUint {
    let mut keyed: Vec<(usize, BigUint, &BigUint)> = a
        .terms()
        .iter()
        .map(|t| {
            let m = notation_size(&t.exponent);
            (m, nat_index_with(tables, &t.exponent, m), &t.coefficient)
        })
        .collect();
    keyed.sort_by(|x, y| x.1.cmp(&y.1));

    let mut rank = BigUint::zero();
    let mut w = weight;
    for (m, idx, k) in keyed {
        let pos = idx - &tables.offset[m];
        let after = &tables.count[m] - pos - 1u32;
        rank += tables.completions(m, &after, w);
        let bits = k.bits() as usize;
        for b in 1..bits {
            rank += tables.completions(m, &after, w - m - b) << (b - 1);
        }
        let low = BigUint::one() << (bits - 1);
        rank += (k - low) * tables.completions(m, &after, w - m - bits);
        w -= m + bits;
    }
    &tables.offset[weight] + rank
}

/// The notation at position `n`; inverse of [`nat_index`].
pub fn unindex(n: &BigUint) -> Ordinal {
    let mut tables = tables_for(16);
    while tables.offset[tables.max_weight + 1] <= *n {
        tables = tables_for(tables.max_weight + 1);
    }
    unindex_with(&tables, n)
}

fn unindex_with(tables: &Tables, n: &BigUint) -> Ordinal {
    // Largest weight whose block starts at or before n.
    let weight = tables.offset.partition_point(|o| o <= n) - 1;
    let mut q = n - &tables.offset[weight];
    let mut w = weight;
    let mut terms: Vec<Term> = Vec::new();
    for m in 0..weight {
        if w <= m {
            break;
        }
        let c = &tables.count[m];
        let mut used = BigUint::zero();
        loop {
            if w <= m {
                break;
            }
            let remaining = c - &used;
            // Vectors that are zero on the first p remaining positions come
            // first; find the largest such p still covering q.
            let mut lo = BigUint::zero();
            let mut hi = remaining.clone();
            while lo < hi {
                let mid: BigUint = (&lo + &hi + 1u32) >> 1;
                if q < tables.completions(m, &(&remaining - &mid), w) {
                    lo = mid;
                } else {
                    hi = mid - 1u32;
                }
            }
            if lo == remaining {
                break;
            }
            let after = &remaining - &lo - 1u32;
            q -= tables.completions(m, &after, w);
            let mut b = 1;
            let coefficient = loop {
                let each = if w >= m + b {
                    tables.completions(m, &after, w - m - b)
                } else {
                    BigUint::zero()
                };
                let block = &each << (b - 1);
                if q < block {
                    let (which, rest) = q.div_rem(&each);
                    q = rest;
                    break (BigUint::one() << (b - 1)) + which;
                } else {
                    q -= block;
                }
                b += 1;
            };
            let pos = &used + &lo;
            let exponent = unindex_with(tables, &(&tables.offset[m] + &pos));
            terms.push(Term {
                exponent,
                coefficient,
            });
            w -= m + b;
            used = pos + 1u32;
        }
    }
    debug_assert!(w == 0 && q.is_zero());
    terms.sort_by(|x, y| y.exponent.cmp(&x.exponent));
    Ordinal { terms }
}

/// Number of notations of each weight up to `max_weight`.
pub fn weight_counts(max_weight: usize) -> Vec<BigUint> {
    tables_for(max_weight).count[..=max_weight].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    /// All notations of exactly the given weight, by brute force.
    fn brute(weight: usize) -> Vec<Ordinal> {
        fn extend(
            remaining: usize,
            below: Option<&Ordinal>,
            acc: &mut Vec<(Ordinal, BigUint)>,
            pools: &[Vec<Ordinal>],
            out: &mut Vec<Ordinal>,
        ) {
            if remaining == 0 {
                out.push(Ordinal::from_terms(acc.iter().cloned()).unwrap());
                return;
            }
            for (m, pool) in pools.iter().enumerate().take(remaining) {
                for e in pool {
                    if below.is_some_and(|b| e >= b) {
                        continue;
                    }
                    for b in 1..=remaining - m {
                        let lo = 1u64 << (b - 1);
                        for k in lo..2 * lo {
                            acc.push((e.clone(), BigUint::from(k)));
                            extend(remaining - m - b, Some(e), acc, pools, out);
                            acc.pop();
                        }
                    }
                }
            }
        }
        let mut pools: Vec<Vec<Ordinal>> = Vec::new();
        for s in 0..=weight {
            let mut out = Vec::new();
            extend(s, None, &mut Vec::new(), &pools, &mut out);
            pools.push(out);
        }
        pools.pop().unwrap()
    }

    #[test]
    fn counts_match_brute_force() {
        let counts = weight_counts(9);
        for (s, c) in counts.iter().enumerate() {
            assert_eq!(*c, BigUint::from(brute(s).len()), "weight {s}");
        }
        // 0 | 1 | 2, 3, w | ...
        assert_eq!(counts[..3], [1u32, 1, 3].map(BigUint::from));
    }

    #[test]
    fn anchors() {
        assert!(nat_index(&Ordinal::zero()).is_zero());
        assert!(unindex(&BigUint::zero()).is_zero());
        assert_eq!(unindex(&BigUint::one()), Ordinal::one());
        let x = o("w^2 + 1");
        assert_eq!(unindex(&nat_index(&x)), x);
    }

    #[test]
    fn finite_ordinals_in_increasing_order() {
        let idx: Vec<BigUint> = (0u32..300).map(|n| nat_index(&Ordinal::nat(n))).collect();
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn first_ten_thousand_are_distinct_and_round_trip() {
        let mut seen = HashSet::new();
        for n in 0u32..10_000 {
            let n = BigUint::from(n);
            let a = unindex(&n);
            assert_eq!(nat_index(&a), n, "{a}");
            assert!(seen.insert(a));
        }
    }

    #[test]
    fn weight_blocks_follow_lexicographic_vectors() {
        // Within one weight, brute-force notations sorted by their
        // coefficient vectors must appear in the same order as unindex.
        for weight in 1..7 {
            let block: Vec<Ordinal> = brute(weight);
            let mut keyed: Vec<(Vec<(BigUint, BigUint)>, Ordinal)> = block
                .into_iter()
                .map(|a| {
                    let mut v: Vec<(BigUint, BigUint)> = a
                        .terms()
                        .iter()
                        .map(|t| (nat_index(&t.exponent), t.coefficient.clone()))
                        .collect();
                    v.sort();
                    (v, a)
                })
                .collect();
            // Lex on the dense vector with 0 first: compare sparse lists by
            // the first differing exponent index; the one that lacks it (or
            // has the smaller coefficient there) is smaller.
            keyed.sort_by(|(x, _), (y, _)| {
                let mut i = 0;
                loop {
                    match (x.get(i), y.get(i)) {
                        (None, None) => return std::cmp::Ordering::Equal,
                        (None, Some(_)) => return std::cmp::Ordering::Less,
                        (Some(_), None) => return std::cmp::Ordering::Greater,
                        (Some(a), Some(b)) => {
                            if a.0 != b.0 {
                                // Lower index present only in one list: that
                                // list has a nonzero where the other has 0.
                                return b.0.cmp(&a.0);
                            }
                            if a.1 != b.1 {
                                return a.1.cmp(&b.1);
                            }
                        }
                    }
                    i += 1;
                }
            });
            let tables = tables_for(weight);
            let start = tables.offset[weight].clone();
            for (i, (_, a)) in keyed.iter().enumerate() {
                assert_eq!(unindex(&(&start + BigUint::from(i))), *a);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip_large_indices(n in any::<u64>()) {
            let n = BigUint::from(n);
            prop_assert_eq!(nat_index(&unindex(&n)), n);
        }
    }
}

//! The injective-sequence count `n* = sum_{i<=n} n!/i!` and its 2-adic
//! behaviour.
//!
//! `n*` is computed by the recurrence `n* = n (n-1)* + 1`, `0* = 1`. Residues
//! modulo `2^r` (r <= 64) follow the same recurrence in wrapping `u64`
//! arithmetic.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("modulus {0} is not a power of two 2^r with r >= 1")]
    BadModulus(BigUint),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Holds,
    Vacuous,
    Counterexample,
}

/// Outcome of checking an arithmetic claim over a range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub claim: String,
    pub range: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl Report {
    pub fn holds(&self) -> bool {
        self.status != Status::Counterexample
    }
}

pub fn star(n: u64) -> BigUint {
    let mut v = BigUint::one();
    for m in 1..=n {
        v = v * m + 1u32;
    }
    v
}

/// `sum_{i=0}^{n} n!/i!`, accumulated as falling products `n (n-1) ... (i+1)`.
pub fn star_by_sum(n: u64) -> BigUint {
    let mut total = BigUint::one();
    let mut term = BigUint::one();
    for i in (0..n).rev() {
        term *= i + 1;
        total += &term;
    }
    total
}

/// `n*` for every `n <= limit`.
pub fn star_table(limit: u64) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(limit as usize + 1);
    let mut v = BigUint::one();
    out.push(v.clone());
    for m in 1..=limit {
        v = v * m + 1u32;
        out.push(v.clone());
    }
    out
}

fn mask(r: u32) -> u64 {
    if r >= 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}

/// Residues of `0*, 1*, ..., limit*` modulo `2^r`, `1 <= r <= 64`.
pub fn star_residues(limit: u64, r: u32) -> Vec<u64> {
    let m = mask(r);
    let mut out = Vec::with_capacity(limit as usize + 1);
    let mut v: u64 = 1 & m;
    out.push(v);
    for n in 1..=limit {
        v = n.wrapping_mul(v).wrapping_add(1) & m;
        out.push(v);
    }
    out
}

/// `n* mod modulus` for a power-of-two modulus, without materializing `n*`.
pub fn star_mod(n: u64, modulus: &BigUint) -> Result<BigUint, StarError> {
    if modulus.count_ones() != 1 || modulus.is_one() {
        return Err(StarError::BadModulus(modulus.clone()));
    }
    let r = modulus.bits() - 1;
    if r <= 64 {
        let m = mask(r as u32);
        let mut v: u64 = 1;
        for k in 1..=n {
            v = k.wrapping_mul(v).wrapping_add(1) & m;
        }
        return Ok(BigUint::from(v));
    }
    let mut v = BigUint::one();
    for k in 1..=n {
        v = (v * k + 1u32) % modulus;
    }
    Ok(v)
}

pub fn is_power_of_two(n: &BigUint) -> bool {
    n.count_ones() == 1
}

fn divides_pow2(r: u32, residue: u64) -> bool {
    residue & mask(r) == 0
}

/// For `n <= limit`: whenever `2^r | n*`, also `2^r | (n+2^r)*` and
/// `2^r` divides no `(n+t)*` with `0 < t < 2^r`.
pub fn check_divisibility_lemma(r: u32, limit: u64) -> Result<Report, StarError> {
    if !(1..=4).contains(&r) {
        return Err(StarError::Precondition(format!(
            "r = {r} must lie in 1..=4"
        )));
    }
    let step = 1u64 << r;
    let res = star_residues(limit + step, r);
    let mut premise = Vec::new();
    let mut counterexample = None;
    for n in 0..=limit {
        if !divides_pow2(r, res[n as usize]) {
            continue;
        }
        premise.push(n);
        if !divides_pow2(r, res[(n + step) as usize]) {
            counterexample = Some(json!({"n": n, "fails": "shift", "t": step}));
            break;
        }
        if let Some(t) = (1..step).find(|&t| divides_pow2(r, res[(n + t) as usize])) {
            counterexample = Some(json!({"n": n, "fails": "gap", "t": t}));
            break;
        }
    }
    let status = match (&counterexample, premise.is_empty()) {
        (Some(_), _) => Status::Counterexample,
        (None, true) => Status::Vacuous,
        (None, false) => Status::Holds,
    };
    Ok(Report {
        claim: format!(
            "2^{r} | n* implies 2^{r} | (n+{step})* and 2^{r} divides no (n+t)* for 0<t<{step}"
        ),
        range: format!("0<=n<={limit}"),
        status,
        counterexample,
        details: Some(json!({ "premise": premise })),
    })
}

/// `sum_{i=j+1}^{n} n!/(i j!)`.
pub fn t_inner(n: u64, j: u64) -> BigUint {
    // n!/j! = (j+1)(j+2)...n; each term drops one factor i.
    let mut total = BigUint::zero();
    for i in (j + 1)..=n {
        let mut p = BigUint::one();
        for f in (j + 1)..=n {
            if f != i {
                p *= f;
            }
        }
        total += p;
    }
    total
}

/// `T(n) = sum_{j=0}^{n-1} sum_{i=j+1}^{n} n!/(i j!)`.
pub fn t_sum(n: u64) -> BigUint {
    (0..n).map(|j| t_inner(n, j)).sum()
}

/// `(n+2^k)* = 2^k T(n) + n* (mod 2^(k+1))` by exact evaluation.
pub fn check_identity_2(n: u64, k: u32) -> Result<Report, StarError> {
    if n < 2 || k < 2 {
        return Err(StarError::Precondition(format!(
            "need n >= 2 and k >= 2, got n = {n}, k = {k}"
        )));
    }
    let modulus = BigUint::one() << (k + 1);
    let lhs = star(n + (1u64 << k)) % &modulus;
    let rhs = ((t_sum(n) << k) + star(n)) % &modulus;
    let ok = lhs == rhs;
    Ok(Report {
        claim: format!("(n+2^{k})* = 2^{k} T(n) + n* mod 2^{}", k + 1),
        range: format!("n={n}"),
        status: if ok {
            Status::Holds
        } else {
            Status::Counterexample
        },
        counterexample: (!ok)
            .then(|| json!({"n": n, "k": k, "lhs": lhs.to_string(), "rhs": rhs.to_string()})),
        details: None,
    })
}

/// Sweep of [`check_identity_2`] over `2 <= n <= n_max`, `2 <= k <= k_max`.
pub fn check_identity_2_range(n_max: u64, k_max: u32) -> Report {
    let pairs: Vec<(u64, u32)> = (2..=n_max)
        .flat_map(|n| (2..=k_max).map(move |k| (n, k)))
        .collect();
    let reports: Vec<Report> = pairs
        .par_iter()
        .map(|&(n, k)| check_identity_2(n, k).expect("preconditions met"))
        .collect();
    let first_bad = reports.into_iter().find(|r| !r.holds());
    Report {
        claim: "(n+2^k)* = 2^k T(n) + n* mod 2^(k+1)".into(),
        range: format!("2<=n<={n_max}, 2<=k<={k_max}"),
        status: if first_bad.is_some() {
            Status::Counterexample
        } else {
            Status::Holds
        },
        counterexample: first_bad.and_then(|r| r.counterexample),
        details: Some(json!({ "pairs": pairs.len() })),
    }
}

/// For odd `n >= 3`: the inner sums are odd for `j` in `{n-1, n-2, n-3}`
/// and even below, so `T(n)` is odd.
pub fn check_t_parity(n: u64) -> Result<Report, StarError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(StarError::Precondition(format!(
            "n = {n} must be odd and >= 3"
        )));
    }
    let mut odd_j = Vec::new();
    let mut bad = None;
    let mut total_odd = false;
    for j in 0..n {
        let odd = t_inner(n, j).bit(0);
        total_odd ^= odd;
        if odd {
            odd_j.push(j);
        }
        let expect_odd = j + 3 >= n;
        if odd != expect_odd && bad.is_none() {
            bad = Some(json!({"n": n, "j": j, "odd": odd}));
        }
    }
    if !total_odd && bad.is_none() {
        bad = Some(json!({"n": n, "total_odd": false}));
    }
    Ok(Report {
        claim: "inner sums odd exactly for j >= n-3; T(n) odd".into(),
        range: format!("n={n}"),
        status: if bad.is_some() {
            Status::Counterexample
        } else {
            Status::Holds
        },
        counterexample: bad,
        details: Some(json!({ "odd_j": odd_j, "t_odd": total_odd })),
    })
}

/// Every `n <= limit` with `n*` a power of two.
///
/// A residue modulo `2^64` decides most `n` outright: below `n = 34` the
/// value fits in a `u128` and is tested directly, and above it `n* > 2^64`,
/// so a power of two must have residue zero. Those candidates are confirmed
/// with the exact value.
pub fn scan_pow2(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut exact: Option<u128> = Some(1);
    let mut residue: u64 = 1;
    for n in 0..=limit {
        if n > 0 {
            residue = n.wrapping_mul(residue).wrapping_add(1);
            exact = exact.and_then(|v| v.checked_mul(n as u128)?.checked_add(1));
        }
        let hit = match exact {
            Some(v) => v.is_power_of_two(),
            None => residue == 0 && is_power_of_two(&star(n)),
        };
        if hit {
            out.push(n);
        }
    }
    out
}

/// [`scan_pow2`] by the exact value at every `n`.
pub fn scan_pow2_exact(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut v = BigUint::one();
    for n in 0..=limit {
        if n > 0 {
            v = v * n + 1u32;
        }
        if is_power_of_two(&v) {
            out.push(n);
        }
    }
    out
}

fn log2_pow(v: &BigUint) -> Option<u64> {
    is_power_of_two(v).then(|| v.bits() - 1)
}

/// If `n* = 2^k` and `(n+t)*` is a power of two then `2^k | t`.
pub fn check_star_gap(n: u64, t: u64) -> Result<Report, StarError> {
    check_star_gap_range(n, t, t)
}

/// [`check_star_gap`] for every `t` in `t_lo..=t_hi`.
pub fn check_star_gap_range(n: u64, t_lo: u64, t_hi: u64) -> Result<Report, StarError> {
    let base = star(n);
    let k = log2_pow(&base)
        .ok_or_else(|| StarError::Precondition(format!("{n}* = {base} is not a power of two")))?;
    let mut premise = Vec::new();
    let mut counterexample = None;
    let mut v = base;
    for m in (n + 1)..=(n + t_hi) {
        v = v * m + 1u32;
        let t = m - n;
        if t < t_lo || !is_power_of_two(&v) {
            continue;
        }
        premise.push(t);
        let divides = k >= 64 || t.is_multiple_of(1u64 << k);
        if !divides && counterexample.is_none() {
            counterexample = Some(json!({"n": n, "t": t, "k": k}));
        }
    }
    let status = match (&counterexample, premise.is_empty()) {
        (Some(_), _) => Status::Counterexample,
        (None, true) => Status::Vacuous,
        (None, false) => Status::Holds,
    };
    Ok(Report {
        claim: format!("{n}* = 2^{k} and (n+t)* a power of two imply 2^{k} | t"),
        range: format!("{t_lo}<=t<={t_hi}"),
        status,
        counterexample,
        details: Some(json!({ "k": k, "premise_t": premise })),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Counts injective sequences over an n-set by depth-first enumeration.
    fn brute(n: usize) -> u64 {
        fn go(used: &mut Vec<bool>) -> u64 {
            let mut count = 1;
            for i in 0..used.len() {
                if !used[i] {
                    used[i] = true;
                    count += go(used);
                    used[i] = false;
                }
            }
            count
        }
        go(&mut vec![false; n])
    }

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn values() {
        assert_eq!(star(0), b(1));
        assert_eq!(star(1), b(2));
        assert_eq!(star(2), b(5));
        assert_eq!(star(3), b(16));
        assert_eq!(star(4), b(65));
        assert_eq!(star(16), b(56_874_039_553_217));
        assert_eq!(brute(4), 65);
    }

    #[test]
    fn formulas_agree() {
        let table = star_table(300);
        for n in 0..=300u64 {
            assert_eq!(table[n as usize], star_by_sum(n), "n = {n}");
        }
        for n in 0..=7 {
            assert_eq!(table[n], b(brute(n)));
        }
    }

    #[test]
    fn residues() {
        assert_eq!(star_mod(3, &b(16)).unwrap(), b(0));
        assert_eq!(star_mod(0, &b(2)).unwrap(), b(1));
        assert_eq!(star_mod(19, &b(16)).unwrap(), b(0));
        assert_eq!(star(19) % 16u32, b(0));
        assert!(star_mod(5, &b(12)).is_err());
        assert!(star_mod(5, &b(1)).is_err());
        let table = star_table(2000);
        for r in 1..=16u32 {
            let res = star_residues(2000, r);
            for n in 0..=2000usize {
                assert_eq!(BigUint::from(res[n]), &table[n] % (1u32 << r));
            }
        }
        // Beyond a machine word.
        let m = BigUint::one() << 100u32;
        assert_eq!(star_mod(40, &m).unwrap(), star(40) % &m);
    }

    #[test]
    fn parity_law() {
        let res = star_residues(10_000, 1);
        for (n, r) in res.iter().enumerate() {
            assert_eq!(n % 2 == 0, *r == 1, "n = {n}");
        }
    }

    #[test]
    fn divisibility_examples() {
        let rep = check_divisibility_lemma(4, 100).unwrap();
        assert_eq!(rep.status, Status::Holds);
        assert_eq!(
            rep.details.unwrap()["premise"],
            json!([3, 19, 35, 51, 67, 83, 99])
        );
        let rep = check_divisibility_lemma(1, 50).unwrap();
        let odd: Vec<u64> = (0..=50).filter(|n| n % 2 == 1).collect();
        assert_eq!(rep.details.unwrap()["premise"], json!(odd));
        let rep = check_divisibility_lemma(4, 3).unwrap();
        assert_eq!(rep.details.unwrap()["premise"], json!([3]));
        for r in 1..=4 {
            assert_eq!(
                check_divisibility_lemma(r, 10_000).unwrap().status,
                Status::Holds
            );
        }
        assert!(check_divisibility_lemma(5, 10).is_err());
    }

    #[test]
    fn identity_2() {
        assert!(check_identity_2(3, 4).unwrap().holds());
        assert!(check_identity_2(5, 2).unwrap().holds());
        assert!(check_identity_2(1, 4).is_err());
        assert_eq!(check_identity_2_range(50, 8).status, Status::Holds);
    }

    #[test]
    fn t_parity() {
        let rep = check_t_parity(5).unwrap();
        assert_eq!(rep.status, Status::Holds);
        assert_eq!(rep.details.as_ref().unwrap()["odd_j"], json!([2, 3, 4]));
        for n in (3..=49).step_by(2) {
            assert_eq!(check_t_parity(n).unwrap().status, Status::Holds, "n = {n}");
        }
        assert!(check_t_parity(4).is_err());
        // T(n) by the closed double sum, independently of t_inner.
        for n in 2..=12u64 {
            let fact = |m: u64| (1..=m).map(BigUint::from).product::<BigUint>();
            let mut t = BigUint::zero();
            for j in 0..n {
                for i in (j + 1)..=n {
                    t += fact(n) / (fact(j) * i);
                }
            }
            assert_eq!(t_sum(n), t);
        }
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(scan_pow2(3), vec![0, 1, 3]);
        assert_eq!(scan_pow2(100), vec![0, 1, 3]);
        assert_eq!(scan_pow2_exact(3000), vec![0, 1, 3]);
        assert_eq!(scan_pow2(3000), vec![0, 1, 3]);
    }

    #[test]
    fn star_gap() {
        let rep = check_star_gap_range(3, 1, 2000).unwrap();
        assert_eq!(rep.status, Status::Vacuous);
        let rep = check_star_gap(1, 2).unwrap();
        assert_eq!(rep.status, Status::Holds);
        let rep = check_star_gap(0, 1).unwrap();
        assert_eq!(rep.status, Status::Holds);
        assert!(check_star_gap(2, 1).is_err());
    }

    proptest! {
        #[test]
        fn recurrence(n in 1u64..400) {
            prop_assert_eq!(star(n), star(n - 1) * n + 1u32);
        }

        #[test]
        fn mod_matches_exact(n in 0u64..600, r in 1u32..80) {
            let m = BigUint::one() << r;
            prop_assert_eq!(star_mod(n, &m).unwrap(), star(n) % &m);
        }
    }
}

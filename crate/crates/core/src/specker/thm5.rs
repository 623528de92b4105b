//! Diagonalization against a purported bijection from all finite
//! sequences onto subsets.
//!
//! The answers on the constant sequences `<s0, ..., s0>` are distinct
//! subsets; they are refined into pairwise disjoint nonempty pieces `c_k`.
//! With chosen elements `S_n`, the `k`-th sequence over `S_n` (by length,
//! then lexicographically) is sent through the oracle to `Gamma(k)`, and
//! `t` collects each `c_k` missing from `Gamma(k)`. Then `t` differs from
//! every `Gamma(k)` inside `c_k`, so its preimage leaves `S_n`.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::{
    resolve_backward, DiagOutcome, Elem, Extension, Oracle, Query, Run, Session, Space, Subset,
    TraceStep, Witness,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thm5Options {
    pub s0: Elem,
    /// Stages to attempt.
    pub budget: usize,
    /// Constant sequences to probe.
    pub probes: usize,
}

/// The `k`-th sequence over `prefix` by length, then lexicographically by
/// position in `prefix`.
pub fn length_lex_sequence(prefix: &[Elem], mut k: usize) -> Option<Query> {
    let m = prefix.len();
    if m == 0 {
        return (k == 0).then(Vec::new);
    }
    let mut len = 0u32;
    loop {
        let block = m.checked_pow(len)?;
        if k < block {
            break;
        }
        k -= block;
        len += 1;
    }
    let mut out = vec![0; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = prefix[k % m];
        k /= m;
    }
    Some(out)
}

/// Inverse of [`length_lex_sequence`].
fn sequence_position(prefix: &[Elem], q: &[Elem]) -> Option<usize> {
    let m = prefix.len();
    let mut pos = 0usize;
    for len in 0..q.len() {
        pos = pos.checked_add(m.checked_pow(len as u32)?)?;
    }
    let mut rank = 0usize;
    for x in q {
        let d = prefix.iter().position(|p| p == x)?;
        rank = rank.checked_mul(m)?.checked_add(d)?;
    }
    pos.checked_add(rank)
}

/// Pairwise disjoint nonempty pieces: `c_i` is the lexicographically least
/// cell below `xi_i`, avoiding earlier pieces, of the partition generated
/// by `xi_0..xi_m`, with `m >= i` grown until such a cell exists. Stops at
/// the first index without one.
pub fn disjointify(xis: &[Subset]) -> Vec<Subset> {
    let mut cs: Vec<Subset> = Vec::new();
    'pieces: for i in 0..xis.len() {
        for m in i..xis.len() {
            let mut cells: BTreeMap<Vec<bool>, Subset> = BTreeMap::new();
            for &x in &xis[i] {
                let sig = xis[..=m].iter().map(|s| s.contains(&x)).collect();
                cells.entry(sig).or_default().insert(x);
            }
            let best = cells
                .into_values()
                .filter(|c| cs.iter().all(|u| u.is_disjoint(c)))
                .min_by(|a, b| a.iter().cmp(b.iter()));
            if let Some(c) = best {
                cs.push(c);
                continue 'pieces;
            }
        }
        break;
    }
    cs
}

/// For each `k`, an element of `c_k` on which `t` and `gamma[k]` differ;
/// `Err(k)` for the first `k` without one.
pub fn check_diagonal(
    t: &Subset,
    cs: &[Subset],
    gammas: &[Subset],
) -> Result<Vec<(usize, Elem)>, usize> {
    cs.iter()
        .zip(gammas)
        .enumerate()
        .map(|(k, (c, g))| {
            c.iter()
                .find(|x| t.contains(x) != g.contains(x))
                .map(|&x| (k, x))
                .ok_or(k)
        })
        .collect()
}

/// The staged construction from `<s0>`.
pub fn thm5_run(o: &Oracle, opts: Thm5Options) -> Run {
    let mut s = Session::new(o);
    let mut steps = Vec::new();
    let mut prefix: Vec<Elem> = vec![opts.s0];
    let mut details = json!(null);
    let outcome = if o.space() != Space::Seq {
        DiagOutcome::Exhausted(format!("expected a seq oracle, got {}", o.space().name()))
    } else if opts.s0 >= o.universe().len() {
        DiagOutcome::Exhausted("s0 is not in the universe".into())
    } else {
        run_stages(&mut s, opts, &mut prefix, &mut steps, &mut details)
    };
    Run {
        steps,
        extensions: prefix[1..].iter().map(|&x| Extension::Element(x)).collect(),
        outcome,
        transcript: s.transcript,
        details,
    }
}

fn run_stages(
    s: &mut Session,
    opts: Thm5Options,
    prefix: &mut Vec<Elem>,
    steps: &mut Vec<TraceStep>,
    details: &mut Value,
) -> DiagOutcome {
    let o = s.oracle;
    let mut xis: Vec<Subset> = Vec::new();
    for i in 0..opts.probes {
        let q = vec![opts.s0; i];
        let Some(xi) = s.ask_forward(&q) else { break };
        if let Some(j) = xis.iter().position(|x| *x == xi) {
            return DiagOutcome::Witness(Witness::NonInjective {
                queries: (vec![opts.s0; j], q),
                answer: xi,
            });
        }
        xis.push(xi);
    }
    let cs = disjointify(&xis);
    let mut diagonals = Vec::new();
    *details = json!({
        "xi": xis.iter().map(|x| o.render_subset(x)).collect::<Vec<_>>(),
        "c": cs.iter().map(|c| o.render_subset(c)).collect::<Vec<_>>(),
        "diagonals": [],
    });
    if cs.is_empty() {
        return DiagOutcome::Exhausted(
            "no disjoint pieces: the universe fragment is too small".into(),
        );
    }
    for stage in 1.. {
        if stage > opts.budget {
            return DiagOutcome::Exhausted(format!("budget of {} stages reached", opts.budget));
        }
        let mut gammas: Vec<Subset> = Vec::with_capacity(cs.len());
        for k in 0..cs.len() {
            let q = length_lex_sequence(prefix, k).expect("index fits");
            let Some(g) = s.ask_forward(&q) else {
                steps.push(TraceStep {
                    stage,
                    query: o.render_query(&q),
                    answer: json!(null),
                    action: "forward refused".into(),
                });
                return DiagOutcome::Witness(Witness::ForwardRefused { query: q });
            };
            if let Some(j) = gammas.iter().position(|p| *p == g) {
                let a = length_lex_sequence(prefix, j).expect("index fits");
                return DiagOutcome::Witness(Witness::NonInjective {
                    queries: (a, q),
                    answer: g,
                });
            }
            gammas.push(g);
        }
        let t: Subset = cs
            .iter()
            .zip(&gammas)
            .filter(|(c, g)| c.is_disjoint(g))
            .flat_map(|(c, _)| c.iter().copied())
            .collect();
        let witnessed = check_diagonal(&t, &cs, &gammas).expect("disjoint nonempty pieces");
        diagonals.push(json!({
            "stage": stage,
            "t": o.render_subset(&t),
            "witnesses": witnessed.iter().map(|(k, x)| json!([k, o.universe()[*x]])).collect::<Vec<_>>(),
        }));
        details["diagonals"] = json!(diagonals);
        let rendered = o.render_subset(&t);
        let q = match resolve_backward(s, &t) {
            Ok(q) => q,
            Err(w) => {
                steps.push(TraceStep {
                    stage,
                    query: rendered,
                    answer: json!(null),
                    action: "backward failed".into(),
                });
                return DiagOutcome::Witness(w);
            }
        };
        let answer = o.render_query(&q);
        match q.iter().find(|x| !prefix.contains(x)) {
            Some(&x) => {
                steps.push(TraceStep {
                    stage,
                    query: rendered,
                    answer,
                    action: "extend".into(),
                });
                prefix.push(x);
            }
            None => {
                steps.push(TraceStep {
                    stage,
                    query: rendered,
                    answer,
                    action: "preimage inside".into(),
                });
                let pos = sequence_position(prefix, &q);
                return DiagOutcome::Exhausted(format!(
                    "preimage is sequence {} over the chosen elements, beyond the {} compared",
                    pos.map_or("?".into(), |p| p.to_string()),
                    cs.len()
                ));
            }
        }
    }
    unreachable!("stage loop returns")
}

//! Diagonalization against a purported bijection from finite subsets onto
//! all subsets.
//!
//! Stages are distinct finite subsets. At each stage every element gets the
//! finite index set `g(x)` of the stages that split its running
//! intersection; `g` separates exactly the classes of elements that no
//! stage tells apart. The `g`-values are ranked, matched with the stages,
//! sent through the oracle, and the diagonal set of elements missing from
//! their own image is pulled back to give the next stage.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{
    resolve_backward, DiagOutcome, Elem, Extension, Oracle, Run, Session, Space, Subset, TraceStep,
    Witness,
};
use crate::encodings::{cantor_bernstein, fin_encode};

/// Indices `mu` with `x` in stage `mu` and stage `mu` cutting the running
/// intersection of the earlier stages containing `x` (the whole universe
/// of `n` elements before any such stage).
pub fn thm3_g(x: Elem, stages: &[Subset], n: usize) -> BTreeSet<usize> {
    let mut d: Subset = (0..n).collect();
    let mut out = BTreeSet::new();
    for (mu, s) in stages.iter().enumerate() {
        if !s.contains(&x) {
            continue;
        }
        let cut: Subset = s.intersection(&d).copied().collect();
        if cut != d {
            out.insert(mu);
        }
        d = cut;
    }
    out
}

fn same_stages(x: Elem, y: Elem, stages: &[Subset]) -> bool {
    stages.iter().all(|s| s.contains(&x) == s.contains(&y))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactReport {
    pub pairs: usize,
    pub holds: bool,
    pub counterexample: Option<(Elem, Elem)>,
}

/// Checks `g(x) = g(y)` iff `x` and `y` lie in the same stages, for all
/// pairs, and that every `g(x)` indexes existing stages.
pub fn thm3_fact_check(n: usize, stages: &[Subset]) -> FactReport {
    let g: Vec<BTreeSet<usize>> = (0..n).map(|x| thm3_g(x, stages, n)).collect();
    let mut pairs = 0;
    for x in 0..n {
        if g[x].iter().any(|&mu| mu >= stages.len()) {
            return FactReport {
                pairs,
                holds: false,
                counterexample: Some((x, x)),
            };
        }
        for y in x..n {
            pairs += 1;
            if (g[x] == g[y]) != same_stages(x, y, stages) {
                return FactReport {
                    pairs,
                    holds: false,
                    counterexample: Some((x, y)),
                };
            }
        }
    }
    FactReport {
        pairs,
        holds: true,
        counterexample: None,
    }
}

/// A random instance: universe size in `1..=max_n`, up to `max_alpha`
/// stages, each a uniformly random subset.
pub fn random_stages(rng: &mut impl Rng, max_n: usize, max_alpha: usize) -> (usize, Vec<Subset>) {
    let n = rng.random_range(1..=max_n);
    let alpha = rng.random_range(0..=max_alpha);
    let stages = (0..alpha)
        .map(|_| (0..n).filter(|_| rng.random_bool(0.5)).collect())
        .collect();
    (n, stages)
}

/// [`thm3_fact_check`] over `trials` seeded random instances; returns the
/// number of pairs checked and the first failing instance.
pub fn thm3_fact_sweep(
    seed: u64,
    trials: usize,
    max_n: usize,
    max_alpha: usize,
) -> (usize, Option<(usize, Vec<Subset>)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = 0;
    for _ in 0..trials {
        let (n, stages) = random_stages(&mut rng, max_n, max_alpha);
        let r = thm3_fact_check(n, &stages);
        pairs += r.pairs;
        if !r.holds {
            return (pairs, Some((n, stages)));
        }
    }
    (pairs, None)
}

/// Matches the ranked `g`-values with the stages: a Cantor-Bernstein
/// bijection when both have the same size, otherwise the value of rank `i`
/// goes to stage `i mod alpha`.
fn match_stages(stages: &[Subset], eta: &HashMap<Elem, usize>, gamma: usize) -> (Vec<usize>, bool) {
    let alpha = stages.len();
    if gamma == alpha {
        // Stage i is coded by the ranks of the g-values of its members.
        let h_codes: Vec<_> = stages
            .iter()
            .map(|s| {
                let mut ranks: Vec<u64> = s.iter().map(|x| eta[x] as u64).collect();
                ranks.sort_unstable();
                ranks.dedup();
                fin_encode(&ranks).expect("ascending")
            })
            .collect();
        let mut sorted = h_codes.clone();
        sorted.sort();
        let pos: Vec<usize> = h_codes
            .iter()
            .map(|c| sorted.binary_search(c).expect("present"))
            .collect();
        let idx: Vec<usize> = (0..alpha).collect();
        if let Ok(b) = cantor_bernstein(&idx, &idx, |x| *x, |i| pos[*i]) {
            return ((0..gamma).map(|r| b.forward[&r]).collect(), true);
        }
    }
    ((0..gamma).map(|r| r % alpha.max(1)).collect(), false)
}

/// One diagonal stage against a finite-set oracle.
pub fn thm3_stage(s: &mut Session, stages: &[Subset]) -> (DiagOutcome, TraceStep) {
    let o = s.oracle;
    let n = o.universe().len();
    let stage = stages.len();
    let step = |query, answer, action: &str| TraceStep {
        stage,
        query,
        answer,
        action: action.to_string(),
    };
    let mut covered: BTreeSet<usize> = BTreeSet::new();
    let target: Subset = if stages.is_empty() {
        o.full()
    } else {
        let g: Vec<BTreeSet<usize>> = (0..n).map(|x| thm3_g(x, stages, n)).collect();
        let codes: Vec<_> = g
            .iter()
            .map(|gx| {
                let v: Vec<u64> = gx.iter().map(|&m| m as u64).collect();
                fin_encode(&v).expect("ascending")
            })
            .collect();
        let mut distinct = codes.clone();
        distinct.sort();
        distinct.dedup();
        let eta: HashMap<Elem, usize> = (0..n)
            .map(|x| (x, distinct.binary_search(&codes[x]).expect("present")))
            .collect();
        let (matched, _) = match_stages(stages, &eta, distinct.len());
        covered = matched.iter().copied().collect();
        // B on each stage, checking injectivity across stages.
        let mut images: Vec<Subset> = Vec::with_capacity(stages.len());
        for (i, st) in stages.iter().enumerate() {
            let q: Vec<Elem> = st.iter().copied().collect();
            let Some(img) = s.ask_forward(&q) else {
                let w = Witness::ForwardRefused { query: q.clone() };
                return (
                    DiagOutcome::Witness(w),
                    step(o.render_query(&q), json!(null), "forward refused"),
                );
            };
            if let Some(j) = images.iter().position(|p| *p == img) {
                let w = Witness::NonInjective {
                    queries: (stages[j].iter().copied().collect(), q),
                    answer: img,
                };
                return (
                    DiagOutcome::Witness(w),
                    step(json!(i), json!(j), "stages collide"),
                );
            }
            images.push(img);
        }
        (0..n)
            .filter(|&x| !images[matched[eta[&x]]].contains(&x))
            .collect()
    };
    let rendered = o.render_subset(&target);
    match resolve_backward(s, &target) {
        Err(w) => (
            DiagOutcome::Witness(w),
            step(rendered, json!(null), "backward failed"),
        ),
        Ok(q) => {
            let new: Subset = q.iter().copied().collect();
            match stages.iter().position(|st| *st == new) {
                None => (
                    DiagOutcome::Extended(Extension::Stage(new)),
                    step(rendered, o.render_query(&q), "extend"),
                ),
                Some(beta) if covered.contains(&beta) => {
                    // Unreachable for a consistent table: the stage's image
                    // would be the diagonal itself.
                    let image = s.ask_forward(&q).unwrap_or_default();
                    let w = Witness::InverseInconsistent {
                        target,
                        query: q.clone(),
                        image,
                    };
                    (
                        DiagOutcome::Witness(w),
                        step(rendered, o.render_query(&q), "repeat"),
                    )
                }
                Some(beta) => (
                    DiagOutcome::Exhausted(format!(
                        "diagonal preimage repeats stage {beta}, which the finite matching left out"
                    )),
                    step(rendered, o.render_query(&q), "repeat outside matching"),
                ),
            }
        }
    }
}

/// Stages from the whole-universe bootstrap until a non-extension or
/// `budget` stages.
pub fn thm3_run(o: &Oracle, budget: usize) -> Run {
    let mut s = Session::new(o);
    let mut stages: Vec<Subset> = Vec::new();
    let mut steps = Vec::new();
    let outcome = if o.space() != Space::FinSet {
        DiagOutcome::Exhausted(format!(
            "expected a finSet oracle, got {}",
            o.space().name()
        ))
    } else {
        loop {
            if stages.len() >= budget {
                break DiagOutcome::Exhausted(format!("budget of {budget} stages reached"));
            }
            let (out, step) = thm3_stage(&mut s, &stages);
            steps.push(step);
            match out {
                DiagOutcome::Extended(Extension::Stage(st)) => stages.push(st),
                other => break other,
            }
        }
    };
    Run {
        steps,
        extensions: stages.into_iter().map(Extension::Stage).collect(),
        outcome,
        transcript: s.transcript,
        details: json!(null),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[Elem]) -> Subset {
        v.iter().copied().collect()
    }

    #[test]
    fn g_examples() {
        // x, y, z = 0, 1, 2
        let stages = [set(&[0, 1]), set(&[0])];
        assert_eq!(thm3_g(0, &stages, 3), BTreeSet::from([0, 1]));
        assert_eq!(thm3_g(1, &stages, 3), BTreeSet::from([0]));
        assert_eq!(thm3_g(2, &stages, 3), BTreeSet::new());
        for x in 0..3 {
            assert!(thm3_g(x, &[set(&[0, 1, 2])], 3).is_empty());
            assert!(thm3_g(x, &[], 3).is_empty());
        }
    }

    /// Direct evaluation of the defining formula, recomputing each
    /// intersection from scratch.
    fn g_by_definition(x: Elem, stages: &[Subset], n: usize) -> BTreeSet<usize> {
        (0..stages.len())
            .filter(|&mu| {
                let mut d: Subset = (0..n).collect();
                for s in stages[..mu].iter().filter(|s| s.contains(&x)) {
                    d = d.intersection(s).copied().collect();
                }
                let cut: Subset = stages[mu].intersection(&d).copied().collect();
                stages[mu].contains(&x) && cut != d
            })
            .collect()
    }

    #[test]
    fn fact_on_examples_and_random() {
        let r = thm3_fact_check(3, &[set(&[0, 1]), set(&[0])]);
        assert!(r.holds);
        assert_eq!(r.pairs, 6);
        let same = vec![set(&[1, 2]); 3];
        let r = thm3_fact_check(4, &same);
        assert!(r.holds);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let (n, stages) = random_stages(&mut rng, 8, 6);
            for x in 0..n {
                assert_eq!(thm3_g(x, &stages, n), g_by_definition(x, &stages, n));
            }
            // the running intersection only shrinks
            for x in 0..n {
                let mut d: Subset = (0..n).collect();
                for s in stages.iter().filter(|s| s.contains(&x)) {
                    let next: Subset = d.intersection(s).copied().collect();
                    assert!(next.is_subset(&d));
                    d = next;
                }
            }
        }
        assert_eq!(thm3_fact_sweep(1, 200, 8, 6).1, None);
    }

    fn oracle(n: usize, forward: &[(&[Elem], &[Elem])]) -> Oracle {
        let universe = (0..n).map(|i| format!("t{i}")).collect();
        let f = forward.iter().map(|(q, s)| (q.to_vec(), set(s))).collect();
        Oracle::new(Space::FinSet, universe, f, None).unwrap()
    }

    #[test]
    fn bootstrap_extends() {
        let o = oracle(3, &[(&[0], &[0, 1, 2])]);
        let mut s = Session::new(&o);
        let (out, _) = thm3_stage(&mut s, &[]);
        assert_eq!(out, DiagOutcome::Extended(Extension::Stage(set(&[0]))));
    }

    #[test]
    fn stage_collision_is_witnessed() {
        let stages = [set(&[0]), set(&[1])];
        let o = oracle(3, &[(&[0], &[0]), (&[1], &[0])]);
        let (out, _) = thm3_stage(&mut Session::new(&o), &stages);
        let DiagOutcome::Witness(w) = out else {
            panic!("{out:?}")
        };
        assert!(matches!(w, Witness::NonInjective { .. }));
        assert!(w.replay(&o).is_ok());
        let o = oracle(3, &[(&[0], &[0, 1, 2]), (&[1], &[0])]);
        let (out, _) = thm3_stage(&mut Session::new(&o), &stages);
        assert!(matches!(
            out,
            DiagOutcome::Witness(Witness::Unattained { .. })
        ));
    }

    #[test]
    fn diagonal_avoids_matched_images() {
        // Every extension from a consistent table yields a diagonal that
        // differs from the image of every matched stage.
        let o = oracle(
            4,
            &[
                (&[0], &[0, 1, 2, 3]),
                (&[1], &[1, 2, 3]),
                (&[2], &[2]),
                (&[3], &[]),
            ],
        );
        let run = thm3_run(&o, 10);
        assert!(run.extended_count() >= 1);
        if let Some(w) = run.witness() {
            assert!(w.replay(&o).is_ok());
        }
    }

    #[test]
    fn wrong_space_is_reported() {
        let o = Oracle::new(Space::Seq, vec!["a".into()], vec![], None).unwrap();
        assert!(matches!(thm3_run(&o, 3).outcome, DiagOutcome::Exhausted(_)));
    }
}

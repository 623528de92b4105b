//! Staged construction against a purported bijection from injective
//! sequences onto subsets.
//!
//! With chosen elements `S_n`, the answers on all injective sequences over
//! `S_n` split the universe into classes. The construction extends by the
//! preimage of the first union of classes no such sequence reaches, or of
//! a missing singleton; when neither exists it stops, and a stop forces
//! the count identity `2^kappa = n*`. After a consistent stop it
//! recommences from `S_n` plus each outside element, and looks for a good
//! set (one that is not a union of classes) to pull back.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    resolve_backward, DiagOutcome, Elem, Extension, Oracle, Query, Run, Session, Space, Subset,
    TraceStep, Witness,
};
use crate::starcount::star;

/// All injective sequences over `prefix`, by length and then
/// lexicographically by position in `prefix`.
pub fn length_lex_injective(prefix: &[Elem]) -> Vec<Query> {
    let n = prefix.len();
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|p| {
                (0..n).filter(|i| !p.contains(i)).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
        out.extend(layer.iter().map(|p| p.iter().map(|&i| prefix[i]).collect()));
    }
    out
}

/// Answers on every injective sequence over the prefix and the classes
/// they induce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqClasses {
    pub queries: Vec<Query>,
    pub answers: Vec<Subset>,
    /// Ordered: at the first query telling two classes apart, the one
    /// inside the answer comes first.
    pub classes: Vec<Subset>,
    pub collision: Option<(Query, Query)>,
}

impl EqClasses {
    pub fn class_of(&self, x: Elem) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&x))
            .expect("classes cover")
    }

    pub fn union(&self, r: &[usize]) -> Subset {
        r.iter()
            .flat_map(|&i| self.classes[i].iter().copied())
            .collect()
    }

    fn attained(&self) -> BTreeSet<&Subset> {
        self.answers.iter().collect()
    }
}

fn eq_with(
    n: usize,
    prefix: &[Elem],
    mut ask: impl FnMut(&[Elem]) -> Option<Subset>,
) -> Result<EqClasses, Witness> {
    let queries = length_lex_injective(prefix);
    let mut answers = Vec::with_capacity(queries.len());
    let mut first: HashMap<Subset, usize> = HashMap::new();
    let mut collision = None;
    for (i, q) in queries.iter().enumerate() {
        let a = ask(q).ok_or_else(|| Witness::ForwardRefused { query: q.clone() })?;
        if let Some(&j) = first.get(&a) {
            collision.get_or_insert_with(|| (queries[j].clone(), q.clone()));
        } else {
            first.insert(a.clone(), i);
        }
        answers.push(a);
    }
    let mut by_sig: HashMap<Vec<bool>, Subset> = HashMap::new();
    for x in 0..n {
        let sig: Vec<bool> = answers.iter().map(|a| !a.contains(&x)).collect();
        by_sig.entry(sig).or_default().insert(x);
    }
    let mut classes: Vec<(Vec<bool>, Subset)> = by_sig.into_iter().collect();
    classes.sort();
    Ok(EqClasses {
        queries,
        answers,
        classes: classes.into_iter().map(|(_, c)| c).collect(),
        collision,
    })
}

/// Classes from direct oracle calls.
pub fn eq_from_oracle(o: &Oracle, prefix: &[Elem]) -> Result<EqClasses, Witness> {
    eq_with(o.universe().len(), prefix, |q| o.forward(q).cloned())
}

/// Sets of class indices by size, then lexicographically.
fn class_sets(kappa: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=kappa).flat_map(move |size| {
        let mut combos = Vec::new();
        let mut cur = Vec::new();
        fn rec(
            start: usize,
            left: usize,
            kappa: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if left == 0 {
                out.push(cur.clone());
                return;
            }
            for i in start..kappa {
                if kappa - i < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, left - 1, kappa, cur, out);
                cur.pop();
            }
        }
        rec(0, size, kappa, &mut cur, &mut combos);
        combos
    })
}

/// The first union of classes no answer equals.
pub fn first_missing_r(eq: &EqClasses) -> Option<(Vec<usize>, Subset)> {
    let attained = eq.attained();
    class_sets(eq.classes.len())
        .map(|r| {
            let u = eq.union(&r);
            (r, u)
        })
        .find(|(_, u)| !attained.contains(u))
}

/// A set is good when it is not a union of classes.
pub fn good(set: &Subset, classes: &[Subset]) -> bool {
    classes
        .iter()
        .any(|c| !c.is_disjoint(set) && !c.is_subset(set))
}

/// Every union of classes is attained and every prefix element is a
/// singleton class.
pub fn stop_check(eq: &EqClasses, prefix: &[Elem]) -> bool {
    first_missing_r(eq).is_none()
        && prefix
            .iter()
            .all(|&x| eq.classes[eq.class_of(x)].len() == 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TminReport {
    /// Elements whose closure is good and of least size.
    pub t_min: Subset,
    pub m_t: usize,
    /// Least size of a set of elements sharing one closure in `t_min`.
    pub m_eq: usize,
    pub same_closure: Vec<Subset>,
}

/// From each element's closure, the least good closures and the sizes of
/// the groups sharing them. `None` when no closure is good.
pub fn tmin_and_m_eq(closures: &[(Elem, Subset)], classes: &[Subset]) -> Option<TminReport> {
    let m_t = closures
        .iter()
        .filter(|(_, c)| good(c, classes))
        .map(|(_, c)| c.len())
        .min()?;
    let t_min: Subset = closures
        .iter()
        .filter(|(_, c)| c.len() == m_t && good(c, classes))
        .map(|(x, _)| *x)
        .collect();
    let mut groups: Vec<Subset> = Vec::new();
    for &x in &t_min {
        let cx = &closures.iter().find(|(y, _)| *y == x).expect("listed").1;
        let group: Subset = closures
            .iter()
            .filter(|(_, c)| c == cx)
            .map(|(y, _)| *y)
            .collect();
        if !groups.contains(&group) {
            groups.push(group);
        }
    }
    let m_eq = groups.iter().map(BTreeSet::len).min().unwrap_or(0);
    Some(TminReport {
        t_min,
        m_t,
        m_eq,
        same_closure: groups,
    })
}

/// A closure listed in order of first appearance in the run, remaining
/// members in universe order; depends only on the set and the run.
pub fn seq_x(closure: &Subset, appearance: &[Elem]) -> Vec<Elem> {
    let mut out = Vec::with_capacity(closure.len());
    let mut used = BTreeSet::new();
    for &x in appearance.iter().filter(|x| closure.contains(x)) {
        if used.insert(x) {
            out.push(x);
        }
    }
    out.extend(closure.iter().filter(|x| !used.contains(x)));
    out
}

/// `Q_i`: the `i`-th entries of the given sequences, for `i < m`.
pub fn q_sets(seqs: &[Vec<Elem>], m: usize) -> Vec<Subset> {
    (0..m)
        .map(|i| seqs.iter().filter_map(|s| s.get(i).copied()).collect())
        .collect()
}

/// Pulls `target` back and extends by its first entry outside `prefix`.
fn extend_by(
    s: &mut Session,
    prefix: &[Elem],
    target: &Subset,
    stage: usize,
    why: &str,
) -> (DiagOutcome, TraceStep) {
    let o = s.oracle;
    let step = |answer, action: String| TraceStep {
        stage,
        query: o.render_subset(target),
        answer,
        action,
    };
    match resolve_backward(s, target) {
        Err(w) => (
            DiagOutcome::Witness(w),
            step(json!(null), format!("{why}: backward failed")),
        ),
        Ok(q) => match q.iter().find(|x| !prefix.contains(x)) {
            Some(&x) => (
                DiagOutcome::Extended(Extension::Element(x)),
                step(o.render_query(&q), format!("{why}: extend")),
            ),
            None => (
                DiagOutcome::Exhausted("preimage lies inside the chosen elements".into()),
                step(o.render_query(&q), format!("{why}: preimage inside")),
            ),
        },
    }
}

/// One stage from `prefix`.
pub fn thm4_stage(s: &mut Session, prefix: &[Elem]) -> (DiagOutcome, TraceStep) {
    let o = s.oracle;
    let n = prefix.len();
    let stage = n;
    let eq = match eq_with(o.universe().len(), prefix, |q| s.ask_forward(q)) {
        Ok(eq) => eq,
        Err(w) => {
            let q = match &w {
                Witness::ForwardRefused { query } => o.render_query(query),
                _ => json!(null),
            };
            return (
                DiagOutcome::Witness(w),
                TraceStep {
                    stage,
                    query: q,
                    answer: json!(null),
                    action: "forward refused".into(),
                },
            );
        }
    };
    let kappa = eq.classes.len();
    if stop_check(&eq, prefix) {
        let star_n = star(n as u64);
        let step = TraceStep {
            stage,
            query: json!({ "kappa": kappa, "n": n }),
            answer: json!(star_n.to_string()),
            action: "stop".into(),
        };
        if (BigUint::one() << kappa) != star_n {
            let w = Witness::StopCount {
                prefix: prefix.to_vec(),
                kappa,
                n,
                star: star_n,
                collision: eq.collision.clone(),
            };
            return (DiagOutcome::Witness(w), step);
        }
        let report = json!({
            "prefix": o.render_elems(prefix),
            "kappa": kappa,
            "classes": eq.classes.iter().map(|c| o.render_subset(c)).collect::<Vec<_>>(),
        });
        return (DiagOutcome::Stopped(report), step);
    }
    if let Some((a, b)) = eq.collision.clone() {
        let answer = o.forward(&a).cloned().unwrap_or_default();
        let step = TraceStep {
            stage,
            query: json!([o.render_query(&a), o.render_query(&b)]),
            answer: o.render_subset(&answer),
            action: "collision".into(),
        };
        return (
            DiagOutcome::Witness(Witness::NonInjective {
                queries: (a, b),
                answer,
            }),
            step,
        );
    }
    if let Some((_, target)) = first_missing_r(&eq) {
        return extend_by(s, prefix, &target, stage, "missing union");
    }
    let attained = eq.attained();
    let x = *prefix
        .iter()
        .find(|&&x| !attained.contains(&Subset::from([x])))
        .expect("no stop, no missing union: a singleton is missing");
    extend_by(s, prefix, &Subset::from([x]), stage, "missing singleton")
}

enum Closure {
    Closed(Vec<Elem>),
    Failed(DiagOutcome),
}

/// Runs stages from `prefix` until a stop.
fn close(
    s: &mut Session,
    mut prefix: Vec<Elem>,
    budget: usize,
    steps: &mut Vec<TraceStep>,
) -> Closure {
    for _ in 0..budget {
        let (out, step) = thm4_stage(s, &prefix);
        steps.push(step);
        match out {
            DiagOutcome::Extended(Extension::Element(x)) => prefix.push(x),
            DiagOutcome::Stopped(_) => return Closure::Closed(prefix),
            other => return Closure::Failed(other),
        }
    }
    Closure::Failed(DiagOutcome::Exhausted(format!(
        "budget of {budget} stages reached"
    )))
}

/// After a consistent stop at `prefix`: closures of every outside element,
/// then the least good closures and the `Q_i` sets.
fn recommence(
    s: &mut Session,
    prefix: &[Elem],
    budget: usize,
    steps: &mut Vec<TraceStep>,
    appearance: &mut Vec<Elem>,
) -> (DiagOutcome, Value) {
    let o = s.oracle;
    let n = o.universe().len();
    let eq = eq_from_oracle(o, prefix).expect("stop state was computed");
    let base: Subset = prefix.iter().copied().collect();
    let mut closures: Vec<(Elem, Subset)> = prefix.iter().map(|&x| (x, base.clone())).collect();
    for x in (0..n).filter(|x| !base.contains(x)) {
        let mut start = prefix.to_vec();
        start.push(x);
        match close(s, start, budget, steps) {
            Closure::Closed(seq) => {
                appearance.extend(
                    seq.iter()
                        .filter(|y| !appearance.contains(y))
                        .copied()
                        .collect::<Vec<_>>(),
                );
                closures.push((x, seq.into_iter().collect()));
            }
            Closure::Failed(out) => {
                return (out, json!({ "recommenced_with": o.universe()[x] }));
            }
        }
    }
    let Some(report) = tmin_and_m_eq(&closures, &eq.classes) else {
        return (
            DiagOutcome::Exhausted("every closure is a union of classes".into()),
            json!(null),
        );
    };
    let details =
        json!({ "t_min": o.render_subset(&report.t_min), "m_t": report.m_t, "m_eq": report.m_eq });
    if good(&report.t_min, &eq.classes) {
        let (out, step) = extend_by(s, prefix, &report.t_min, prefix.len(), "good T_min");
        steps.push(step);
        return (out, details);
    }
    let seqs: Vec<Vec<Elem>> = report
        .t_min
        .iter()
        .map(|x| {
            let c = &closures.iter().find(|(y, _)| y == x).expect("listed").1;
            seq_x(c, appearance)
        })
        .collect();
    let qs = q_sets(&seqs, report.m_t);
    match qs.iter().find(|q| good(q, &eq.classes)) {
        Some(q) => {
            let (out, step) = extend_by(s, prefix, q, prefix.len(), "good Q_i");
            steps.push(step);
            (out, details)
        }
        None => (DiagOutcome::Exhausted("no Q_i is good".into()), details),
    }
}

/// The staged construction from the first `seed` universe elements, for at
/// most `budget` stages.
pub fn thm4_engine(o: &Oracle, seed: usize, budget: usize) -> Run {
    let mut s = Session::new(o);
    let mut steps = Vec::new();
    let mut prefix: Vec<Elem> = (0..seed.min(o.universe().len())).collect();
    let mut appearance = prefix.clone();
    let mut details = json!(null);
    let outcome = if o.space() != Space::InjSeq {
        DiagOutcome::Exhausted(format!(
            "expected an injSeq oracle, got {}",
            o.space().name()
        ))
    } else if o.universe().len() < seed {
        DiagOutcome::Exhausted(format!("universe smaller than the seed of {seed}"))
    } else {
        let mut stages = 0;
        loop {
            if stages >= budget {
                break DiagOutcome::Exhausted(format!("budget of {budget} stages reached"));
            }
            stages += 1;
            let (out, step) = thm4_stage(&mut s, &prefix);
            steps.push(step);
            let out = match out {
                DiagOutcome::Stopped(_) => {
                    let (out, d) = recommence(&mut s, &prefix, budget, &mut steps, &mut appearance);
                    details = d;
                    out
                }
                other => other,
            };
            match out {
                DiagOutcome::Extended(Extension::Element(x)) => {
                    prefix.push(x);
                    if !appearance.contains(&x) {
                        appearance.push(x);
                    }
                }
                other => break other,
            }
        }
    };
    Run {
        steps,
        extensions: prefix[seed.min(prefix.len())..]
            .iter()
            .map(|&x| Extension::Element(x))
            .collect(),
        outcome,
        transcript: s.transcript,
        details,
    }
}

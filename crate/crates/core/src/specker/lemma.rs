//! Diagonalization against a purported injection from subsets into
//! injective sequences.
//!
//! The oracle lists the injection backwards: a forward entry sends an
//! injective sequence to the subset it codes, and a backward query asks
//! for the sequence of a subset. The chosen elements `T` are numbered by
//! stage; element `x` of stage `i` is sent to the `i`-th injective
//! sequence of stage numbers, read as a sequence of elements of `T`, and
//! then to the subset it codes. The diagonal is pulled back and the first
//! entry outside `T` is the next element.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde_json::json;

use super::{
    resolve_backward, DiagOutcome, Elem, Extension, Oracle, Run, Session, Space, Subset, TraceStep,
    Witness,
};
use crate::encodings::injseq_decode;
use crate::starcount::star;

/// How a flattening stream ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlattenEnd {
    /// The stream ran out; `pending` inputs since the last output.
    StreamEnded { pending: usize },
    /// Input `position` repeats an earlier sequence.
    Duplicate { position: usize },
    /// Input `position` repeats an element.
    NotInjective { position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flattened {
    pub outputs: Vec<Elem>,
    /// Inputs consumed for each output, the output's own input included.
    pub consumed: Vec<usize>,
    pub end: FlattenEnd,
}

/// Turns pairwise distinct injective sequences into pairwise distinct
/// elements: each output is the first entry of the next input that leaves
/// the elements already output.
pub fn lemma_flatten(seqs: impl IntoIterator<Item = Vec<Elem>>) -> Flattened {
    let mut seen_seqs: HashSet<Vec<Elem>> = HashSet::new();
    let mut emitted: HashSet<Elem> = HashSet::new();
    let mut outputs = Vec::new();
    let mut consumed = Vec::new();
    let mut pending = 0;
    for (position, s) in seqs.into_iter().enumerate() {
        if s.iter().collect::<HashSet<_>>().len() != s.len() {
            return Flattened {
                outputs,
                consumed,
                end: FlattenEnd::NotInjective { position },
            };
        }
        if !seen_seqs.insert(s.clone()) {
            return Flattened {
                outputs,
                consumed,
                end: FlattenEnd::Duplicate { position },
            };
        }
        pending += 1;
        if let Some(&x) = s.iter().find(|x| !emitted.contains(x)) {
            emitted.insert(x);
            outputs.push(x);
            consumed.push(pending);
            pending = 0;
        }
    }
    Flattened {
        outputs,
        consumed,
        end: FlattenEnd::StreamEnded { pending },
    }
}

/// Inputs that may pass before an output, with `k` elements output:
/// every injective sequence inside them, plus one.
pub fn flatten_bound(k: usize) -> BigUint {
    star(k as u64) + 1u32
}

/// The sequence assigned to the element chosen at stage `i`, if all its
/// stage numbers exist yet.
fn assigned_sequence(i: usize, t: &[Elem]) -> Option<Vec<Elem>> {
    injseq_decode(&BigUint::from(i))
        .iter()
        .map(|b| usize::try_from(b).ok().and_then(|j| t.get(j).copied()))
        .collect()
}

/// One stage: `t` lists the chosen elements in order.
pub fn lemma_stage(s: &mut Session, t: &[Elem]) -> (DiagOutcome, TraceStep) {
    let o = s.oracle;
    let n = o.universe().len();
    let stage = t.len();
    let mut gamma: Vec<Option<Subset>> = vec![None; n];
    for (i, &x) in t.iter().enumerate() {
        if let Some(seq) = assigned_sequence(i, t) {
            gamma[x] = s.ask_forward(&seq);
        }
    }
    let target: Subset = (0..n)
        .filter(|&x| gamma[x].as_ref().is_none_or(|g| !g.contains(&x)))
        .collect();
    let rendered = o.render_subset(&target);
    let step = |answer, action: &str| TraceStep {
        stage,
        query: rendered.clone(),
        answer,
        action: action.to_string(),
    };
    let q = match resolve_backward(s, &target) {
        Ok(q) => q,
        Err(w) => {
            return (
                DiagOutcome::Witness(w),
                step(json!(null), "backward failed"),
            )
        }
    };
    let answer = o.render_query(&q);
    if let Some(&x) = q.iter().find(|x| !t.contains(x)) {
        return (
            DiagOutcome::Extended(Extension::Element(x)),
            step(answer, "extend"),
        );
    }
    // The answer stays inside T. Look for another subset the transcript
    // ties to the same sequence.
    let other = s
        .transcript
        .iter()
        .find_map(|e| match (&e.query, &e.subset) {
            (Some(eq), Some(sub)) if *eq == q && *sub != target => Some(sub.clone()),
            _ => None,
        })
        .or_else(|| o.forward(&q).filter(|img| **img != target).cloned());
    match other {
        Some(image) => (
            DiagOutcome::Witness(Witness::InverseInconsistent {
                target,
                query: q,
                image,
            }),
            step(answer, "answer inside T collides"),
        ),
        None => (
            DiagOutcome::Exhausted("answer lies inside the chosen elements".into()),
            step(answer, "answer inside T"),
        ),
    }
}

pub fn lemma_run(o: &Oracle, budget: usize) -> Run {
    let mut s = Session::new(o);
    let mut t: Vec<Elem> = Vec::new();
    let mut steps = Vec::new();
    let outcome = if o.space() != Space::InjSeq {
        DiagOutcome::Exhausted(format!(
            "expected an injSeq oracle, got {}",
            o.space().name()
        ))
    } else {
        loop {
            if t.len() >= budget {
                break DiagOutcome::Exhausted(format!("budget of {budget} stages reached"));
            }
            let (out, step) = lemma_stage(&mut s, &t);
            steps.push(step);
            match out {
                DiagOutcome::Extended(Extension::Element(x)) => t.push(x),
                other => break other,
            }
        }
    };
    Run {
        steps,
        extensions: t.iter().map(|&x| Extension::Element(x)).collect(),
        outcome,
        transcript: s.transcript,
        details: json!(null),
    }
}

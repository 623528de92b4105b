//! Diagonalization engines driven by finite bijection oracles.
//!
//! An oracle is a finite table purporting to be a fragment of a bijection
//! between a space of finite structures over a universe (finite sets,
//! sequences or injective sequences of its elements) and the subsets of
//! the universe. Each engine builds its distinguishing sequence stage by
//! stage from oracle answers and either extends it, reaches a stop state,
//! or returns a [`Witness`]: concrete data showing the table cannot be part
//! of a bijection. Every witness can be replayed against the oracle.

mod lemma;
mod oracle;
mod thm3;
mod thm4;
mod thm5;

pub use lemma::{flatten_bound, lemma_flatten, lemma_run, lemma_stage, FlattenEnd, Flattened};
pub use oracle::{Direction, Event, Oracle, OracleError, Preimage, Session, Space};
pub use thm3::{
    random_stages, thm3_fact_check, thm3_fact_sweep, thm3_g, thm3_run, thm3_stage, FactReport,
};
pub use thm4::{
    eq_from_oracle, first_missing_r, good, length_lex_injective, q_sets, seq_x, stop_check,
    thm4_engine, thm4_stage, tmin_and_m_eq, EqClasses, TminReport,
};
pub use thm5::{check_diagonal, disjointify, length_lex_sequence, thm5_run, Thm5Options};

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use crate::starcount::star;

pub type Elem = usize;
pub type Subset = BTreeSet<Elem>;
/// A decoded query: ascending for finite sets, in order for sequences.
pub type Query = Vec<Elem>;

/// Data showing a table is not a fragment of a bijection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Two queries with the same answer.
    NonInjective {
        queries: (Query, Query),
        answer: Subset,
    },
    /// A query the table does not answer although the map is total.
    ForwardRefused { query: Query },
    /// A subset no table entry reaches; `searched` entries were checked.
    Unattained { target: Subset, searched: usize },
    /// The backward answer for `target` maps forward to `image`.
    InverseInconsistent {
        target: Subset,
        query: Query,
        image: Subset,
    },
    /// A stop state whose class count violates `2^kappa = n*`.
    StopCount {
        prefix: Vec<Elem>,
        kappa: usize,
        n: usize,
        star: BigUint,
        collision: Option<(Query, Query)>,
    },
}

impl Witness {
    pub fn kind(&self) -> &'static str {
        match self {
            Witness::NonInjective { .. } => "non-injective",
            Witness::ForwardRefused { .. } => "forward-refused",
            Witness::Unattained { .. } => "unattained",
            Witness::InverseInconsistent { .. } => "inverse-inconsistent",
            Witness::StopCount { .. } => "stop-count",
        }
    }

    pub fn to_json(&self, o: &Oracle) -> Value {
        let mut v = match self {
            Witness::NonInjective { queries, answer } => json!({
                "queries": [o.render_query(&queries.0), o.render_query(&queries.1)],
                "answer": o.render_subset(answer),
            }),
            Witness::ForwardRefused { query } => json!({ "query": o.render_query(query) }),
            Witness::Unattained { target, searched } => json!({
                "target": o.render_subset(target),
                "searched": searched,
            }),
            Witness::InverseInconsistent {
                target,
                query,
                image,
            } => json!({
                "target": o.render_subset(target),
                "query": o.render_query(query),
                "image": o.render_subset(image),
            }),
            Witness::StopCount {
                prefix,
                kappa,
                n,
                star,
                collision,
            } => json!({
                "prefix": o.render_elems(prefix),
                "kappa": kappa,
                "n": n,
                "star": star.to_string(),
                "collision": collision
                    .as_ref()
                    .map(|(a, b)| json!([o.render_query(a), o.render_query(b)])),
            }),
        };
        v["kind"] = json!(self.kind());
        v
    }

    /// Re-derives the violation from the oracle alone.
    pub fn replay(&self, o: &Oracle) -> Result<(), String> {
        let fail = |m: &str| Err(m.to_string());
        match self {
            Witness::NonInjective {
                queries: (a, b),
                answer,
            } => {
                if a == b {
                    return fail("queries coincide");
                }
                if o.forward(a) != Some(answer) || o.forward(b) != Some(answer) {
                    return fail("queries do not share the answer");
                }
            }
            Witness::ForwardRefused { query } => {
                if o.forward(query).is_some() {
                    return fail("query is answered");
                }
            }
            Witness::Unattained { target, searched } => {
                if *searched != o.len() {
                    return fail("search did not cover the table");
                }
                if o.entries().any(|(_, s)| s == target) || o.backward(target) != Preimage::None {
                    return fail("target is attained");
                }
            }
            Witness::InverseInconsistent {
                target,
                query,
                image,
            } => {
                if o.backward(target) != Preimage::Unique(query.clone()) {
                    return fail("backward answer differs");
                }
                if o.forward(query) != Some(image) || image == target {
                    return fail("forward answer is consistent");
                }
            }
            Witness::StopCount {
                prefix,
                kappa,
                n,
                star: s,
                collision,
            } => {
                let eq = eq_from_oracle(o, prefix).map_err(|w| format!("{w:?}"))?;
                if eq.classes.len() != *kappa || prefix.len() != *n || *s != star(*n as u64) {
                    return fail("stop data does not recompute");
                }
                if !stop_check(&eq, prefix) {
                    return fail("stop conditions fail");
                }
                if (BigUint::one() << *kappa) == *s {
                    return fail("count identity holds");
                }
                if let Some((a, b)) = collision {
                    if a == b || o.forward(a).is_none() || o.forward(a) != o.forward(b) {
                        return fail("collision does not replay");
                    }
                }
            }
        }
        Ok(())
    }
}

/// What a stage added to the construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    Stage(Subset),
    Element(Elem),
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiagOutcome {
    Extended(Extension),
    Stopped(Value),
    Witness(Witness),
    /// The finite fragment ran out before the argument could proceed.
    Exhausted(String),
}

impl DiagOutcome {
    pub fn status(&self) -> &'static str {
        match self {
            DiagOutcome::Extended(_) | DiagOutcome::Stopped(_) => "ok",
            DiagOutcome::Witness(_) => "witness",
            DiagOutcome::Exhausted(_) => "exhausted",
        }
    }

    pub fn to_json(&self, o: &Oracle) -> Value {
        match self {
            DiagOutcome::Extended(Extension::Stage(s)) => {
                json!({ "extended": { "stage": o.render_subset(s) } })
            }
            DiagOutcome::Extended(Extension::Element(e)) => {
                json!({ "extended": { "element": o.universe()[*e] } })
            }
            DiagOutcome::Stopped(r) => json!({ "stopped": r }),
            DiagOutcome::Witness(w) => json!({ "witness": w.to_json(o) }),
            DiagOutcome::Exhausted(why) => json!({ "exhausted": why }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub stage: usize,
    pub query: Value,
    pub answer: Value,
    pub action: String,
}

/// A full engine run: one trace step per stage and the final outcome.
#[derive(Debug, Clone)]
pub struct Run {
    pub steps: Vec<TraceStep>,
    pub extensions: Vec<Extension>,
    pub outcome: DiagOutcome,
    pub transcript: Vec<Event>,
    /// Engine-specific data (diagonal checks, probe results).
    pub details: Value,
}

impl Run {
    pub fn extended_count(&self) -> usize {
        self.extensions.len()
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            DiagOutcome::Witness(w) => Some(w),
            _ => None,
        }
    }

    pub fn to_json(&self, o: &Oracle) -> Value {
        json!({
            "outcome": self.outcome.to_json(o),
            "extensions": self.extensions.iter().map(|e| match e {
                Extension::Stage(s) => o.render_subset(s),
                Extension::Element(x) => json!(o.universe()[*x]),
            }).collect::<Vec<_>>(),
            "trace": self.steps.iter().map(|s| json!({
                "stage": s.stage,
                "query": s.query,
                "answer": s.answer,
                "action": s.action,
            })).collect::<Vec<_>>(),
            "transcript": self.transcript.iter().map(|e| e.to_json(o)).collect::<Vec<_>>(),
            "details": self.details,
        })
    }
}

/// Turns a backward answer into the preimage query or a witness.
fn resolve_backward(s: &mut Session, target: &Subset) -> Result<Query, Witness> {
    match s.ask_backward(target) {
        Preimage::None => Err(Witness::Unattained {
            target: target.clone(),
            searched: s.oracle.len(),
        }),
        Preimage::Ambiguous(a, b) => Err(Witness::NonInjective {
            queries: (a, b),
            answer: target.clone(),
        }),
        Preimage::Unique(q) => match s.ask_forward(&q) {
            Some(image) if image != *target => Err(Witness::InverseInconsistent {
                target: target.clone(),
                query: q,
                image,
            }),
            _ => Ok(q),
        },
    }
}

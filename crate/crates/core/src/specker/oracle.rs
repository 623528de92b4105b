//! Oracle tables, their JSON form and the query transcript.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{Elem, Query, Subset};
use crate::encodings::{
    fin_decode, fin_encode, injseq_decode, injseq_encode, seq_decode, seq_encode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    #[serde(rename = "finSet")]
    FinSet,
    #[serde(rename = "seq")]
    Seq,
    #[serde(rename = "injSeq")]
    InjSeq,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::FinSet => "finSet",
            Space::Seq => "seq",
            Space::InjSeq => "injSeq",
        }
    }
}

/// A load failure with the JSON location it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for OracleError {}

fn err(location: impl Into<String>, message: impl Into<String>) -> OracleError {
    OracleError {
        location: location.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preimage {
    None,
    Unique(Query),
    Ambiguous(Query, Query),
}

#[derive(Debug, Clone)]
pub struct Oracle {
    space: Space,
    universe: Vec<String>,
    index: HashMap<String, Elem>,
    entries: Vec<(Query, Subset)>,
    by_query: HashMap<Query, usize>,
    by_answer: HashMap<Subset, Vec<usize>>,
    explicit: Option<HashMap<Subset, Query>>,
}

impl Oracle {
    /// Validates the table; the backward map is the inversion of `forward`
    /// unless `backward` is supplied.
    pub fn new(
        space: Space,
        universe: Vec<String>,
        forward: Vec<(Query, Subset)>,
        backward: Option<Vec<(Subset, Query)>>,
    ) -> Result<Self, OracleError> {
        let mut index = HashMap::new();
        for (i, t) in universe.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(err(
                    format!("universe[{i}]"),
                    format!("duplicate token {t:?}"),
                ));
            }
        }
        let n = universe.len();
        let mut o = Oracle {
            space,
            universe,
            index,
            entries: Vec::new(),
            by_query: HashMap::new(),
            by_answer: HashMap::new(),
            explicit: None,
        };
        for (i, (q, s)) in forward.into_iter().enumerate() {
            o.check_query(&q)
                .map_err(|m| err(format!("forward[{i}][0]"), m))?;
            if let Some(e) = s.iter().find(|&&e| e >= n) {
                return Err(err(
                    format!("forward[{i}][1]"),
                    format!("element {e} outside the universe"),
                ));
            }
            if o.by_query.insert(q.clone(), i).is_some() {
                return Err(err(format!("forward[{i}][0]"), "query listed twice"));
            }
            o.by_answer.entry(s.clone()).or_default().push(i);
            o.entries.push((q, s));
        }
        if let Some(back) = backward {
            let mut map = HashMap::new();
            for (i, (s, q)) in back.into_iter().enumerate() {
                o.check_query(&q)
                    .map_err(|m| err(format!("backward[{i}][1]"), m))?;
                if map.insert(s, q).is_some() {
                    return Err(err(format!("backward[{i}][0]"), "subset listed twice"));
                }
            }
            o.explicit = Some(map);
        }
        Ok(o)
    }

    fn check_query(&self, q: &[Elem]) -> Result<(), String> {
        if let Some(e) = q.iter().find(|&&e| e >= self.universe.len()) {
            return Err(format!("element {e} outside the universe"));
        }
        match self.space {
            Space::FinSet if q.windows(2).any(|w| w[0] >= w[1]) => {
                Err("finite set must be strictly ascending".into())
            }
            Space::InjSeq
                if q.iter().collect::<std::collections::HashSet<_>>().len() != q.len() =>
            {
                Err("sequence repeats an element".into())
            }
            _ => Ok(()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, OracleError> {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            err(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self, OracleError> {
        let obj = v
            .as_object()
            .ok_or_else(|| err("$", "expected an object"))?;
        let space: Space = serde_json::from_value(obj.get("space").cloned().unwrap_or(Value::Null))
            .map_err(|_| err("space", "expected \"finSet\", \"seq\" or \"injSeq\""))?;
        let universe: Vec<String> = obj
            .get("universe")
            .and_then(Value::as_array)
            .ok_or_else(|| err("universe", "expected an array of tokens"))?
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| err(format!("universe[{i}]"), "expected a string"))
            })
            .collect::<Result<_, _>>()?;
        let index: HashMap<&str, Elem> = universe
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        let subset = |v: &Value, loc: String| -> Result<Subset, OracleError> {
            let arr = v
                .as_array()
                .ok_or_else(|| err(&loc, "expected an array of tokens"))?;
            let mut s = Subset::new();
            for (j, t) in arr.iter().enumerate() {
                let e = t
                    .as_str()
                    .and_then(|t| index.get(t))
                    .ok_or_else(|| err(format!("{loc}[{j}]"), format!("unknown token {t}")))?;
                if !s.insert(*e) {
                    return Err(err(format!("{loc}[{j}]"), "token repeated"));
                }
            }
            Ok(s)
        };
        let query = |v: &Value, loc: String| -> Result<Query, OracleError> {
            let code = match v {
                Value::Number(n) => n.as_u64().map(BigUint::from),
                Value::String(s) => s.parse::<BigUint>().ok(),
                Value::Array(arr) => {
                    let mut q = Vec::with_capacity(arr.len());
                    for (j, t) in arr.iter().enumerate() {
                        let e = t.as_str().and_then(|t| index.get(t)).ok_or_else(|| {
                            err(format!("{loc}[{j}]"), format!("unknown token {t}"))
                        })?;
                        q.push(*e);
                    }
                    if space == Space::FinSet {
                        q.sort_unstable();
                    }
                    return Ok(q);
                }
                _ => None,
            }
            .ok_or_else(|| err(&loc, "expected a natural code or a token array"))?;
            decode_query(space, &code, universe.len()).map_err(|m| err(&loc, m))
        };
        let pairs = |key: &str| -> Result<Vec<(Value, Value)>, OracleError> {
            let Some(arr) = obj.get(key) else {
                return Ok(Vec::new());
            };
            let arr = arr
                .as_array()
                .ok_or_else(|| err(key, "expected an array of pairs"))?;
            arr.iter()
                .enumerate()
                .map(|(i, p)| match p.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok((a.clone(), b.clone())),
                    _ => Err(err(format!("{key}[{i}]"), "expected a two-element array")),
                })
                .collect()
        };
        if obj.get("forward").is_none() {
            return Err(err("forward", "missing"));
        }
        let forward = pairs("forward")?
            .iter()
            .enumerate()
            .map(|(i, (q, s))| {
                Ok((
                    query(q, format!("forward[{i}][0]"))?,
                    subset(s, format!("forward[{i}][1]"))?,
                ))
            })
            .collect::<Result<Vec<_>, OracleError>>()?;
        let backward = match obj.get("backward") {
            None => None,
            Some(_) => Some(
                pairs("backward")?
                    .iter()
                    .enumerate()
                    .map(|(i, (s, q))| {
                        Ok((
                            subset(s, format!("backward[{i}][0]"))?,
                            query(q, format!("backward[{i}][1]"))?,
                        ))
                    })
                    .collect::<Result<Vec<_>, OracleError>>()?,
            ),
        };
        Self::new(space, universe, forward, backward)
    }

    /// The file form: query codes as decimal strings, subsets as tokens.
    pub fn to_value(&self) -> Value {
        let mut v = json!({
            "space": self.space.name(),
            "universe": self.universe,
            "forward": self.entries.iter().map(|(q, s)| {
                json!([self.code(q).to_string(), self.subset_tokens(s)])
            }).collect::<Vec<_>>(),
        });
        if let Some(back) = &self.explicit {
            let mut rows: Vec<(&Subset, &Query)> = back.iter().collect();
            rows.sort();
            v["backward"] = rows
                .iter()
                .map(|(s, q)| json!([self.subset_tokens(s), self.code(q).to_string()]))
                .collect();
        }
        v
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn element(&self, token: &str) -> Option<Elem> {
        self.index.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Query, &Subset)> {
        self.entries.iter().map(|(q, s)| (q, s))
    }

    pub fn full(&self) -> Subset {
        (0..self.universe.len()).collect()
    }

    pub fn forward(&self, q: &[Elem]) -> Option<&Subset> {
        self.by_query.get(q).map(|&i| &self.entries[i].1)
    }

    pub fn backward(&self, s: &Subset) -> Preimage {
        if let Some(map) = &self.explicit {
            return map
                .get(s)
                .map_or(Preimage::None, |q| Preimage::Unique(q.clone()));
        }
        match self.by_answer.get(s).map(Vec::as_slice) {
            None | Some([]) => Preimage::None,
            Some([i]) => Preimage::Unique(self.entries[*i].0.clone()),
            Some([i, j, ..]) => {
                Preimage::Ambiguous(self.entries[*i].0.clone(), self.entries[*j].0.clone())
            }
        }
    }

    /// Two table queries sharing an answer, if any.
    pub fn first_collision(&self) -> Option<(Query, Query)> {
        self.entries
            .iter()
            .find_map(|(_, s)| match self.by_answer[s].as_slice() {
                [i, j, ..] => Some((self.entries[*i].0.clone(), self.entries[*j].0.clone())),
                _ => None,
            })
    }

    pub fn code(&self, q: &[Elem]) -> BigUint {
        let big: Vec<BigUint> = q.iter().map(|&e| BigUint::from(e)).collect();
        match self.space {
            Space::FinSet => {
                let v: Vec<u64> = q.iter().map(|&e| e as u64).collect();
                fin_encode(&v).expect("validated ascending")
            }
            Space::Seq => seq_encode(&big),
            Space::InjSeq => injseq_encode(&big).expect("validated injective"),
        }
    }

    fn subset_tokens(&self, s: &Subset) -> Vec<&str> {
        s.iter().map(|&e| self.universe[e].as_str()).collect()
    }

    pub fn render_elems(&self, q: &[Elem]) -> Value {
        json!(q
            .iter()
            .map(|&e| self.universe[e].as_str())
            .collect::<Vec<_>>())
    }

    pub fn render_query(&self, q: &[Elem]) -> Value {
        json!({ "code": self.code(q).to_string(), "value": self.render_elems(q) })
    }

    pub fn render_subset(&self, s: &Subset) -> Value {
        json!(self.subset_tokens(s))
    }
}

fn decode_query(space: Space, code: &BigUint, n: usize) -> Result<Query, String> {
    let raw: Vec<BigUint> = match space {
        Space::FinSet => fin_decode(code).into_iter().map(BigUint::from).collect(),
        Space::Seq => seq_decode(code),
        Space::InjSeq => injseq_decode(code),
    };
    raw.iter()
        .map(|b| match usize::try_from(b) {
            Ok(e) if e < n => Ok(e),
            _ => Err(format!(
                "code {code} names element {b} outside the universe"
            )),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// One oracle call: the forward query or backward target and the reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub direction: Direction,
    pub query: Option<Query>,
    pub subset: Option<Subset>,
}

impl Event {
    pub fn to_json(&self, o: &Oracle) -> Value {
        json!({
            "direction": self.direction,
            "query": self.query.as_ref().map(|q| o.render_query(q)),
            "subset": self.subset.as_ref().map(|s| o.render_subset(s)),
        })
    }
}

/// An oracle plus the transcript of the calls made against it.
#[derive(Debug, Clone)]
pub struct Session<'a> {
    pub oracle: &'a Oracle,
    pub transcript: Vec<Event>,
}

impl<'a> Session<'a> {
    pub fn new(oracle: &'a Oracle) -> Self {
        Session {
            oracle,
            transcript: Vec::new(),
        }
    }

    pub fn ask_forward(&mut self, q: &[Elem]) -> Option<Subset> {
        let a = self.oracle.forward(q).cloned();
        self.transcript.push(Event {
            direction: Direction::Forward,
            query: Some(q.to_vec()),
            subset: a.clone(),
        });
        a
    }

    pub fn ask_backward(&mut self, s: &Subset) -> Preimage {
        let p = self.oracle.backward(s);
        self.transcript.push(Event {
            direction: Direction::Backward,
            query: match &p {
                Preimage::Unique(q) => Some(q.clone()),
                _ => None,
            },
            subset: Some(s.clone()),
        });
        p
    }
}

//! Builds the oracle fixtures by running each engine against a growing
//! table: a refused forward query gets the least unused nonempty subset,
//! an unattained target gets the shortest unused query that leaves the
//! current construction. Set `UPDATE_FIXTURES=1` to rewrite the files.

use std::collections::BTreeSet;
use std::path::PathBuf;

use choiceless::specker::{
    lemma_run, thm3_run, thm4_engine, thm5_run, Elem, Extension, Oracle, Query, Run, Space, Subset,
    Thm5Options, Witness,
};

fn universe(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect()
}

/// Subsets of `0..n` by size, then lexicographically; empty set last.
fn subsets_in_order(n: usize) -> Vec<Subset> {
    let mut all: Vec<Subset> = (1u32..(1 << n))
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.push(Subset::new());
    all
}

/// Queries of the space by length, then lexicographically.
fn queries_in_order(space: Space, n: usize, max_len: usize) -> Vec<Query> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Query> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|q| {
                (0..n).filter_map(move |e| {
                    let ok = match space {
                        Space::FinSet => q.last().is_none_or(|&l| e > l),
                        Space::Seq => true,
                        Space::InjSeq => !q.contains(&e),
                    };
                    ok.then(|| {
                        let mut r = q.clone();
                        r.push(e);
                        r
                    })
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn chosen(run: &Run) -> Vec<Elem> {
    run.extensions
        .iter()
        .flat_map(|e| match e {
            Extension::Stage(s) => s.iter().copied().collect::<Vec<_>>(),
            Extension::Element(x) => vec![*x],
        })
        .collect()
}

struct Builder {
    space: Space,
    n: usize,
    forward: Vec<(Query, Subset)>,
    /// Elements a preimage must leave besides the chosen ones.
    seed: Vec<Elem>,
    /// Stage-valued engines accept any unused query as a preimage.
    stage_valued: bool,
}

impl Builder {
    fn new(space: Space, n: usize) -> Self {
        Builder {
            space,
            n,
            forward: Vec::new(),
            seed: Vec::new(),
            stage_valued: false,
        }
    }

    fn oracle(&self) -> Oracle {
        Oracle::new(self.space, universe(self.n), self.forward.clone(), None).unwrap()
    }

    fn fresh_subset(&self) -> Subset {
        let used: BTreeSet<&Subset> = self.forward.iter().map(|(_, s)| s).collect();
        subsets_in_order(self.n)
            .into_iter()
            .find(|s| !used.contains(s))
            .expect("a subset is unused")
    }

    fn fresh_query(&self, run: &Run) -> Query {
        let used: BTreeSet<&Query> = self.forward.iter().map(|(q, _)| q).collect();
        let mut inside: Vec<Elem> = self.seed.clone();
        inside.extend(chosen(run));
        queries_in_order(self.space, self.n, 3)
            .into_iter()
            .filter(|q| !used.contains(q))
            .find(|q| self.stage_valued || q.iter().any(|x| !inside.contains(x)))
            .expect("a query is unused")
    }

    /// Feeds the engine until `done` accepts a run.
    fn grow(&mut self, engine: impl Fn(&Oracle) -> Run, done: impl Fn(&Run) -> bool) -> Run {
        for _ in 0..10_000 {
            let run = engine(&self.oracle());
            if done(&run) {
                return run;
            }
            match run.witness() {
                Some(Witness::ForwardRefused { query }) => {
                    let s = self.fresh_subset();
                    self.forward.push((query.clone(), s));
                }
                Some(Witness::Unattained { target, .. }) => {
                    let q = self.fresh_query(&run);
                    self.forward.push((q, target.clone()));
                }
                _ => panic!("builder cannot continue: {:?}", run.outcome),
            }
        }
        panic!("builder did not converge")
    }
}

fn is_unattained(r: &Run) -> bool {
    matches!(r.witness(), Some(Witness::Unattained { .. }))
}

fn thm3_extend() -> Oracle {
    let mut b = Builder::new(Space::FinSet, 6);
    b.stage_valued = true;
    b.grow(
        |o| thm3_run(o, 10),
        |r| r.extended_count() == 3 && is_unattained(r),
    );
    b.oracle()
}

fn thm3_collision() -> Oracle {
    let mut b = Builder::new(Space::FinSet, 6);
    b.stage_valued = true;
    let run = b.grow(
        |o| thm3_run(o, 10),
        |r| r.extended_count() == 1 && is_unattained(r),
    );
    let Some(Witness::Unattained { target, .. }) = run.witness().cloned() else {
        unreachable!()
    };
    for _ in 0..2 {
        let q = b.fresh_query(&run);
        b.forward.push((q, target.clone()));
    }
    b.oracle()
}

fn lemma() -> Oracle {
    let mut b = Builder::new(Space::InjSeq, 5);
    // The first chosen element is sent to <>, which codes {a}.
    b.forward.push((vec![], Subset::from([0])));
    let run = b.grow(
        |o| lemma_run(o, 10),
        |r| r.extended_count() == 2 && is_unattained(r),
    );
    let Some(Witness::Unattained { target, .. }) = run.witness().cloned() else {
        unreachable!()
    };
    // The explicit inverse sends the unattained target to the first
    // table query, whose forward answer differs.
    let mut backward: Vec<(Subset, Query)> = b
        .forward
        .iter()
        .map(|(q, s)| (s.clone(), q.clone()))
        .collect();
    backward.push((target, b.forward[0].0.clone()));
    Oracle::new(Space::InjSeq, universe(5), b.forward, Some(backward)).unwrap()
}

fn thm4_extend() -> Oracle {
    let mut b = Builder::new(Space::InjSeq, 7);
    b.seed = (0..4).collect();
    b.grow(
        |o| thm4_engine(o, 4, 10),
        |r| r.extended_count() == 1 && matches!(r.witness(), Some(Witness::ForwardRefused { .. })),
    );
    b.oracle()
}

fn thm4_collision() -> Oracle {
    let mut b = Builder::new(Space::InjSeq, 7);
    b.seed = (0..4).collect();
    // Fill Seq of the seed except its last sequence, which repeats the
    // first answer.
    let seqs = queries_in_order(Space::InjSeq, 4, 4);
    let last = seqs.last().unwrap().clone();
    b.grow(
        |o| thm4_engine(o, 4, 10),
        |r| matches!(r.witness(), Some(Witness::ForwardRefused { query }) if *query == last),
    );
    let first = b.forward[0].1.clone();
    b.forward.push((last, first));
    b.oracle()
}

fn thm4_stop() -> Oracle {
    // Every subset of {a, b, c, d} is an answer, so the classes are the
    // singletons and all unions are attained.
    let subsets = subsets_in_order(4);
    let forward = queries_in_order(Space::InjSeq, 4, 4)
        .into_iter()
        .enumerate()
        .map(|(i, q)| (q, subsets[i % subsets.len()].clone()))
        .collect();
    Oracle::new(Space::InjSeq, universe(4), forward, None).unwrap()
}

fn thm5() -> Oracle {
    let mut b = Builder::new(Space::Seq, 8);
    b.seed = vec![0];
    // The constant sequences of a: <a>^i goes to the single element 7 - i.
    for i in 0..8 {
        b.forward.push((vec![0; i], Subset::from([7 - i])));
    }
    let opts = Thm5Options {
        s0: 0,
        budget: 10,
        probes: 8,
    };
    b.grow(
        |o| thm5_run(o, opts),
        |r| r.extended_count() == 2 && is_unattained(r),
    );
    b.oracle()
}

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

/// One table row per line.
fn render(v: &serde_json::Value) -> String {
    let line = |key: &str| -> String {
        let rows: Vec<String> = v[key]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| format!("    {r}"))
            .collect();
        format!("  \"{key}\": [\n{}\n  ]", rows.join(",\n"))
    };
    let mut parts = vec![
        format!("  \"space\": {}", v["space"]),
        format!("  \"universe\": {}", v["universe"]),
        line("forward"),
    ];
    if v.get("backward").is_some() {
        parts.push(line("backward"));
    }
    format!("{{\n{}\n}}\n", parts.join(",\n"))
}

fn check(name: &str, o: Oracle) {
    let text = render(&o.to_value());
    let path = fixture_path(name);
    if std::env::var_os("UPDATE_FIXTURES").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let on_disk = std::fs::read_to_string(&path).unwrap_or_default();
    assert_eq!(
        on_disk, text,
        "{name} is stale; rerun with UPDATE_FIXTURES=1"
    );
    let reloaded = Oracle::from_json(&on_disk).unwrap();
    assert_eq!(reloaded.to_value(), o.to_value());
}

#[test]
fn thm3_fixtures_are_current() {
    check("thm3_extend.json", thm3_extend());
    check("thm3_collision.json", thm3_collision());
}

#[test]
fn lemma_fixture_is_current() {
    check("lemma.json", lemma());
}

#[test]
fn thm4_fixtures_are_current() {
    check("thm4_extend.json", thm4_extend());
    check("thm4_collision.json", thm4_collision());
    check("thm4_stop.json", thm4_stop());
}

#[test]
fn thm5_fixture_is_current() {
    check("thm5.json", thm5());
}

#[test]
fn scripted_outcomes() {
    let o = thm3_extend();
    let r = thm3_run(&o, 10);
    assert_eq!(r.extended_count(), 3);
    assert!(is_unattained(&r));

    let o = thm3_collision();
    let r = thm3_run(&o, 10);
    assert_eq!(r.extended_count(), 1);
    assert!(matches!(r.witness(), Some(Witness::NonInjective { .. })));

    let o = lemma();
    let r = lemma_run(&o, 10);
    assert_eq!(r.extended_count(), 2);
    assert!(matches!(
        r.witness(),
        Some(Witness::InverseInconsistent { .. })
    ));

    let o = thm4_extend();
    let r = thm4_engine(&o, 4, 10);
    assert_eq!(r.extended_count(), 1);
    assert!(matches!(r.witness(), Some(Witness::ForwardRefused { .. })));

    let o = thm4_collision();
    let r = thm4_engine(&o, 4, 10);
    assert_eq!(r.extended_count(), 0);
    assert!(matches!(r.witness(), Some(Witness::NonInjective { .. })));

    let o = thm4_stop();
    let r = thm4_engine(&o, 4, 10);
    let Some(Witness::StopCount { kappa, n, star, .. }) = r.witness() else {
        panic!("{:?}", r.outcome)
    };
    assert_eq!((*kappa, *n, star.to_string().as_str()), (4, 4, "65"));

    let o = thm5();
    let r = thm5_run(
        &o,
        Thm5Options {
            s0: 0,
            budget: 10,
            probes: 8,
        },
    );
    assert_eq!(r.extended_count(), 2);
    assert!(is_unattained(&r));
    assert_eq!(r.details["diagonals"].as_array().unwrap().len(), 3);

    for o in [thm3_collision(), lemma()] {
        let run = match o.space() {
            Space::FinSet => thm3_run(&o, 10),
            _ => lemma_run(&o, 10),
        };
        assert!(run.witness().unwrap().replay(&o).is_ok());
    }
}

//! Finite levels of the layered atom model built from sequences of atoms.
//!
//! Level `0` is a single root atom with the empty sequence and the trivial
//! group. Level `n+1` adds, for each sequence `z` of length `<= n` over the
//! level-`n` atoms that no atom carries yet, `2 k_n` fresh atoms carrying
//! `z`, where `k_n` is the size of the level-`n` group. A level-`(n+1)`
//! group element is a pair `(g, j)`: `g` acts on old atoms and on carried
//! sequences entrywise, and `j` shifts the index of fresh atoms modulo
//! `2 k_n`.
//!
//! Atoms are numbered densely, older levels first, and grouped into fibers
//! of atoms carrying the same sequence.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

pub type AtomId = usize;

pub const DEFAULT_DEPTH_CAP: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HereditaryError {
    #[error("level {level} exceeds the depth cap {cap}")]
    DepthCap { level: usize, cap: usize },
    #[error("unknown atom {0}")]
    UnknownAtom(AtomId),
    #[error("sequence not yet realized at this level")]
    NotYetRealized,
    #[error("level too shallow: need level {needed}, built {built}")]
    TooShallow { needed: usize, built: usize },
}

/// Atoms carrying one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiber {
    pub level: usize,
    pub seq: Vec<AtomId>,
    pub first: AtomId,
    pub count: usize,
}

/// A group element of some level: `parent` indexes the previous level's
/// group, `shift` moves fresh-atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupElem {
    pub parent: usize,
    pub shift: usize,
}

#[derive(Debug, Clone)]
pub struct LevelState {
    pub n: usize,
    fibers: Vec<Fiber>,
    atom_fiber: Vec<u32>,
    by_seq: HashMap<Vec<AtomId>, usize>,
    /// `|A_m|` for `m <= n`.
    sizes: Vec<usize>,
    /// `k_m` for `m <= n`.
    k: Vec<u64>,
    /// Group elements per level.
    groups: Vec<Vec<GroupElem>>,
    /// Number of unrealized sequences used at each step `m < n`.
    new_seqs: Vec<usize>,
}

/// Sequences of length `<= max_len` over `0..atoms`, by length then lex.
fn sequences(atoms: usize, max_len: usize) -> impl Iterator<Item = Vec<AtomId>> {
    (0..=max_len).flat_map(move |len| {
        let total = (atoms as u64).checked_pow(len as u32).unwrap_or(u64::MAX);
        (0..total).map(move |mut code| {
            let mut s = vec![0; len];
            for slot in s.iter_mut().rev() {
                *slot = (code % atoms as u64) as usize;
                code /= atoms as u64;
            }
            s
        })
    })
}

impl LevelState {
    fn root() -> Self {
        let root = Fiber {
            level: 0,
            seq: Vec::new(),
            first: 0,
            count: 1,
        };
        LevelState {
            n: 0,
            by_seq: HashMap::from([(Vec::new(), 0)]),
            fibers: vec![root],
            atom_fiber: vec![0],
            sizes: vec![1],
            k: vec![1],
            groups: vec![vec![GroupElem {
                parent: 0,
                shift: 0,
            }]],
            new_seqs: Vec::new(),
        }
    }

    fn grow(&mut self) {
        let n = self.n;
        let atoms = self.sizes[n];
        let fresh_per_seq = 2 * self.k[n] as usize;
        let unrealized: Vec<Vec<AtomId>> = sequences(atoms, n)
            .filter(|s| !self.by_seq.contains_key(s))
            .collect();
        let mut next = atoms;
        for seq in &unrealized {
            self.by_seq.insert(seq.clone(), self.fibers.len());
            self.atom_fiber
                .extend(std::iter::repeat_n(self.fibers.len() as u32, fresh_per_seq));
            self.fibers.push(Fiber {
                level: n + 1,
                seq: seq.clone(),
                first: next,
                count: fresh_per_seq,
            });
            next += fresh_per_seq;
        }
        // Without fresh atoms every shift acts trivially.
        let shifts = if unrealized.is_empty() {
            1
        } else {
            fresh_per_seq
        };
        let group: Vec<GroupElem> = (0..self.groups[n].len())
            .flat_map(|parent| (0..shifts).map(move |shift| GroupElem { parent, shift }))
            .collect();
        self.new_seqs.push(unrealized.len());
        self.k.push(group.len() as u64);
        self.groups.push(group);
        self.sizes.push(next);
        self.n = n + 1;
    }

    pub fn atom_count(&self) -> usize {
        self.sizes[self.n]
    }

    /// `|A_m|` for `m <= n`.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `k_m` for `m <= n`.
    pub fn group_sizes(&self) -> &[u64] {
        &self.k
    }

    /// `|E_m|` for `m < n`.
    pub fn unrealized_counts(&self) -> &[usize] {
        &self.new_seqs
    }

    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn group(&self, level: usize) -> &[GroupElem] {
        &self.groups[level]
    }

    fn fiber_of(&self, x: AtomId) -> Result<&Fiber, HereditaryError> {
        self.atom_fiber
            .get(x)
            .map(|&f| &self.fibers[f as usize])
            .ok_or(HereditaryError::UnknownAtom(x))
    }

    /// The sequence carried by `x`.
    pub fn sq(&self, x: AtomId) -> Result<&[AtomId], HereditaryError> {
        Ok(&self.fiber_of(x)?.seq)
    }

    pub fn level_of(&self, x: AtomId) -> Result<usize, HereditaryError> {
        Ok(self.fiber_of(x)?.level)
    }

    /// `Sq(x)(m)`, or `None` past the end.
    pub fn f(&self, m: usize, x: AtomId) -> Result<Option<AtomId>, HereditaryError> {
        Ok(self.sq(x)?.get(m).copied())
    }

    /// Atoms grouped by agreement of every coordinate function.
    pub fn eq_classes(&self) -> Vec<Vec<AtomId>> {
        let width = self.fibers.iter().map(|f| f.seq.len()).max().unwrap_or(0) + 1;
        let mut classes: BTreeMap<Vec<Option<AtomId>>, Vec<AtomId>> = BTreeMap::new();
        for x in 0..self.atom_count() {
            let key = (0..width).map(|m| self.f(m, x).unwrap()).collect();
            classes.entry(key).or_default().push(x);
        }
        let mut out: Vec<Vec<AtomId>> = classes.into_values().collect();
        out.sort();
        out
    }

    /// Atoms carrying `seq`.
    pub fn psi(&self, seq: &[AtomId]) -> Result<Vec<AtomId>, HereditaryError> {
        let f = self
            .by_seq
            .get(seq)
            .ok_or(HereditaryError::NotYetRealized)?;
        let fiber = &self.fibers[*f];
        Ok((fiber.first..fiber.first + fiber.count).collect())
    }

    /// Image of `x` under element `e` of the level-`level` group.
    pub fn apply(&self, level: usize, e: usize, x: AtomId) -> AtomId {
        if level == 0 || x < self.sizes[level - 1] {
            if level == 0 {
                return x;
            }
            return self.apply(level - 1, self.groups[level][e].parent, x);
        }
        let elem = self.groups[level][e];
        let fiber = &self.fibers[self.atom_fiber[x] as usize];
        let image: Vec<AtomId> = fiber
            .seq
            .iter()
            .map(|&y| self.apply(level - 1, elem.parent, y))
            .collect();
        let target = &self.fibers[self.by_seq[&image]];
        let i = x - fiber.first;
        target.first + (i + elem.shift) % fiber.count
    }

    /// Element `e` of the level-`level` group as a permutation table.
    pub fn permutation(&self, level: usize, e: usize) -> Vec<AtomId> {
        (0..self.sizes[level])
            .map(|x| self.apply(level, e, x))
            .collect()
    }

    /// Readable name: `a` for the root, `(level,<seq>,i)` otherwise.
    pub fn describe(&self, x: AtomId) -> String {
        let f = &self.fibers[self.atom_fiber[x] as usize];
        if f.level == 0 {
            return "a".into();
        }
        let inner: Vec<String> = f.seq.iter().map(|&y| self.describe(y)).collect();
        format!("({},<{}>,{})", f.level, inner.join(","), x - f.first)
    }
}

/// Levels `0..=n`; refuses `n` above `cap`.
pub fn build_level(n: usize, cap: usize) -> Result<LevelState, HereditaryError> {
    if n > cap {
        return Err(HereditaryError::DepthCap { level: n, cap });
    }
    let mut s = LevelState::root();
    while s.n < n {
        s.grow();
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fact3Report {
    /// Least level `n >= 1` containing `B`; `C` is its atom set.
    pub level: usize,
    pub c_size: usize,
    /// `2 k_n`.
    pub k: u64,
    pub y: Vec<String>,
    /// Distinct images of `Y` under the pointwise stabilizer of `C`.
    pub y_images: usize,
    /// Least orbit size of an atom outside `C`.
    pub min_orbit_outside_c: usize,
    pub stabilizer_size: usize,
    /// The claimed count `|{H[Y]}| = k`.
    pub images_equal_k: bool,
    /// The claimed bound `orbit > k` outside `C`.
    pub orbits_exceed_k: bool,
}

/// Counts images of `Y` and orbits outside `C` for the finite set `b`,
/// enumerating the group of the deepest built level.
pub fn fact3_counter(state: &LevelState, b: &[AtomId]) -> Result<Fact3Report, HereditaryError> {
    for &x in b {
        state.fiber_of(x)?;
    }
    let n = (1..=state.n)
        .find(|&m| b.iter().all(|&x| x < state.sizes[m]))
        .unwrap_or(state.n.max(1));
    if state.n < n + 1 {
        return Err(HereditaryError::TooShallow {
            needed: n + 1,
            built: state.n,
        });
    }
    let top = state.n;
    let c_size = state.sizes[n];
    let k = 2 * state.k[n];
    let y: Vec<AtomId> = (c_size..state.sizes[n + 1])
        .filter(|&x| {
            let f = state.fiber_of(x).unwrap();
            (x - f.first).is_multiple_of(2)
        })
        .collect();
    let stabilizer: Vec<usize> = (0..state.groups[top].len())
        .filter(|&e| (0..c_size).all(|x| state.apply(top, e, x) == x))
        .collect();
    let images: BTreeSet<Vec<AtomId>> = stabilizer
        .iter()
        .map(|&e| {
            let mut img: Vec<AtomId> = y.iter().map(|&x| state.apply(top, e, x)).collect();
            img.sort_unstable();
            img
        })
        .collect();
    let min_orbit = (c_size..state.sizes[top])
        .map(|x| {
            stabilizer
                .iter()
                .map(|&e| state.apply(top, e, x))
                .collect::<BTreeSet<_>>()
                .len()
        })
        .min()
        .unwrap_or(0);
    Ok(Fact3Report {
        level: n,
        c_size,
        k,
        y: y.iter().map(|&x| state.describe(x)).collect(),
        y_images: images.len(),
        min_orbit_outside_c: min_orbit,
        stabilizer_size: stabilizer.len(),
        images_equal_k: images.len() as u64 == k,
        orbits_exceed_k: min_orbit as u64 > k,
    })
}

/// First `m` with `k_m >= k_(m+1)`, if any.
pub fn first_non_increase(state: &LevelState) -> Option<usize> {
    state.k.windows(2).position(|w| w[0] >= w[1])
}

/// Summary for reports: sizes, group orders, class census and the
/// counting check at level 1 when deep enough.
pub fn level_report(state: &LevelState) -> Value {
    let mut census: BTreeMap<usize, usize> = BTreeMap::new();
    for c in state.eq_classes() {
        *census.entry(c.len()).or_default() += 1;
    }
    let fact3 = fact3_counter(state, &[0]).ok();
    json!({
        "level": state.n,
        "atoms": state.sizes,
        "k": state.k,
        "unrealized": state.new_seqs,
        "class_sizes": census,
        "k_first_non_increase": first_non_increase(state),
        "fact3": fact3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent construction: atoms as explicit `(seq, index)` records
    /// and each group as a deduplicated set of permutation tables.
    struct Brute {
        atoms: Vec<(Vec<usize>, usize)>,
        groups: Vec<BTreeSet<Vec<usize>>>,
    }

    fn brute(depth: usize) -> Brute {
        let mut atoms: Vec<(Vec<usize>, usize)> = vec![(vec![], 0)];
        let mut groups = vec![BTreeSet::from([vec![0usize]])];
        for n in 0..depth {
            let old = atoms.len();
            let k = groups[n].len();
            let carried: BTreeSet<Vec<usize>> = atoms.iter().map(|(s, _)| s.clone()).collect();
            let mut fresh: Vec<Vec<usize>> = Vec::new();
            // all sequences of length <= n over 0..old
            let mut layer: Vec<Vec<usize>> = vec![vec![]];
            for len in 0..=n {
                if len > 0 {
                    layer = layer
                        .iter()
                        .flat_map(|s| {
                            (0..old).map(move |a| {
                                let mut t = s.clone();
                                t.push(a);
                                t
                            })
                        })
                        .collect();
                }
                fresh.extend(layer.iter().filter(|s| !carried.contains(*s)).cloned());
            }
            for s in &fresh {
                for i in 0..2 * k {
                    atoms.push((s.clone(), i));
                }
            }
            let find = |s: &Vec<usize>, i: usize| {
                atoms.iter().position(|(t, j)| t == s && *j == i).unwrap()
            };
            let mut next = BTreeSet::new();
            for g in &groups[n] {
                for j in 0..2 * k {
                    let mut perm: Vec<usize> = g.clone();
                    for x in old..atoms.len() {
                        let (s, i) = &atoms[x];
                        let img: Vec<usize> = s.iter().map(|&y| g[y]).collect();
                        perm.push(find(&img, (i + j) % (2 * k)));
                    }
                    next.insert(perm);
                }
            }
            groups.push(next);
        }
        Brute { atoms, groups }
    }

    #[test]
    fn sizes_match_independent_construction() {
        let s = build_level(3, 3).unwrap();
        let b = brute(3);
        assert_eq!(s.atom_count(), b.atoms.len());
        let k: Vec<u64> = b.groups.iter().map(|g| g.len() as u64).collect();
        assert_eq!(s.group_sizes(), &k[..]);
        // Frozen after agreement with the brute-force build.
        assert_eq!(s.sizes(), &[1, 1, 3, 47]);
        assert_eq!(s.group_sizes(), &[1, 1, 2, 8]);
        assert_eq!(s.unrealized_counts(), &[0, 1, 11]);
        // Group elements as tables coincide with the brute-force sets.
        for level in 0..=3 {
            let tables: BTreeSet<Vec<usize>> = (0..s.group(level).len())
                .map(|e| s.permutation(level, e))
                .collect();
            assert_eq!(tables.len(), s.group(level).len());
            let brute_tables: BTreeSet<Vec<usize>> = b.groups[level].clone();
            // Same atom numbering: fibers in length-lex order, index inside.
            assert_eq!(tables, brute_tables, "level {level}");
        }
    }

    #[test]
    fn early_levels() {
        let s1 = build_level(1, 3).unwrap();
        assert_eq!((s1.atom_count(), s1.group_sizes()[1]), (1, 1));
        let s2 = build_level(2, 3).unwrap();
        assert_eq!((s2.atom_count(), s2.group_sizes()[2]), (3, 2));
        assert_eq!(s2.describe(1), "(2,<a>,0)");
        assert!(matches!(
            build_level(4, 3),
            Err(HereditaryError::DepthCap { .. })
        ));
    }

    #[test]
    fn coordinate_functions() {
        let s = build_level(2, 3).unwrap();
        assert_eq!(s.f(0, 0).unwrap(), None);
        assert_eq!(s.f(0, 1).unwrap(), Some(0));
        assert_eq!(s.f(1, 1).unwrap(), None);
        assert!(s.f(0, 99).is_err());
    }

    #[test]
    fn classes_are_fibers() {
        let s2 = build_level(2, 3).unwrap();
        assert_eq!(s2.eq_classes(), vec![vec![0], vec![1, 2]]);
        let s3 = build_level(3, 3).unwrap();
        let classes = s3.eq_classes();
        assert_eq!(classes.len(), s3.fibers().len());
        for c in &classes {
            let f = &s3.fibers()[s3.atom_fiber[c[0]] as usize];
            let bound = if f.level == 0 {
                1
            } else {
                2 * s3.group_sizes()[f.level - 1] as usize
            };
            assert!(c.len() <= bound);
        }
    }

    #[test]
    fn psi_is_injective_on_realized() {
        let s = build_level(3, 3).unwrap();
        assert_eq!(s.psi(&[]).unwrap(), vec![0]);
        assert_eq!(s.psi(&[0]).unwrap(), vec![1, 2]);
        assert_eq!(s.psi(&[5, 5, 5]), Err(HereditaryError::NotYetRealized));
        let mut seen = BTreeSet::new();
        for f in s.fibers() {
            let img = s.psi(&f.seq).unwrap();
            assert!(!img.is_empty());
            for x in &img {
                assert!(seen.insert(*x));
            }
        }
        assert_eq!(seen.len(), s.atom_count());
    }

    #[test]
    fn restriction_and_fiber_laws() {
        let s2 = build_level(2, 3).unwrap();
        let s3 = build_level(3, 3).unwrap();
        for x in 0..s2.atom_count() {
            assert_eq!(s2.sq(x).unwrap(), s3.sq(x).unwrap());
        }
        let g2: BTreeSet<Vec<usize>> = (0..s3.group(2).len())
            .map(|e| s3.permutation(2, e))
            .collect();
        for e in 0..s3.group(3).len() {
            let p = s3.permutation(3, e);
            assert!(g2.contains(&p[..s3.sizes()[2]].to_vec()));
            for f in s3.fibers() {
                let img: Vec<usize> = f.seq.iter().map(|&y| p[y]).collect();
                let mut moved: Vec<usize> = s3.psi(&f.seq).unwrap().iter().map(|&x| p[x]).collect();
                moved.sort_unstable();
                assert_eq!(moved, s3.psi(&img).unwrap());
            }
        }
        for n in 0..3 {
            if s3.unrealized_counts()[n] > 0 {
                let k = s3.group_sizes()[n];
                assert_eq!(s3.group_sizes()[n + 1], k * 2 * k);
            }
        }
        assert_eq!(first_non_increase(&s3), Some(0));
    }

    #[test]
    fn counting_fact_at_level_one() {
        let s = build_level(2, 3).unwrap();
        let r = fact3_counter(&s, &[0]).unwrap();
        assert_eq!(r.level, 1);
        assert_eq!(r.k, 2);
        assert_eq!(r.y, vec!["(2,<a>,0)"]);
        assert_eq!(r.y_images, 2);
        assert_eq!(r.min_orbit_outside_c, 2);
        assert!(!r.orbits_exceed_k);
        let s3 = build_level(3, 3).unwrap();
        let r3 = fact3_counter(&s3, &[0]).unwrap();
        assert_eq!(r3.y_images, 2);
        assert!(r3.stabilizer_size >= 1);
        let shallow = build_level(1, 3).unwrap();
        assert!(matches!(
            fact3_counter(&shallow, &[0]),
            Err(HereditaryError::TooShallow { .. })
        ));
    }

    #[test]
    fn counting_fact_at_level_two() {
        let s = build_level(3, 3).unwrap();
        let r = fact3_counter(&s, &[1, 2]).unwrap();
        assert_eq!((r.level, r.k, r.c_size), (2, 4, 3));
        assert_eq!(r.y.len(), 11 * 2);
        // The stabilizer of A_2 is the set of pure shifts.
        assert_eq!(r.stabilizer_size, 4);
        assert_eq!(r.y_images, 2);
        assert_eq!(r.min_orbit_outside_c, 4);
    }
}

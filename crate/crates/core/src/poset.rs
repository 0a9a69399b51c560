//! Closed subsets of the rotation digraph and the stable matchings they
//! stand for.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::instance::Instance;
use crate::lattice::is_stable;
use crate::matching::{Matching, MatchingError};
use crate::rotations::{eliminate, RotationDigraph, RotationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("rotation digraph has a cycle through r{0}")]
    Cyclic(usize),
    #[error("rotation index {0} is out of range")]
    OutOfRange(usize),
    #[error("set is not closed: r{rotation} is in it but its predecessor r{missing} is not")]
    NotClosed { rotation: usize, missing: usize },
    #[error("sequence is not a topological order of the rotations")]
    NotTopological,
    #[error("matching is not stable")]
    Unstable,
    #[error("matching is not reachable from the man-optimal matching by these rotations")]
    NotInLattice,
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// A set of rotation indices, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClosedSet(Vec<usize>);

impl ClosedSet {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = members.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ClosedSet(v)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    /// Orders by size, then lexicographically.
    pub fn size_then_lex(a: &ClosedSet, b: &ClosedSet) -> std::cmp::Ordering {
        a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0))
    }
}

impl fmt::Display for ClosedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|r| format!("r{}", r + 1)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A topological order of the rotations, smallest available index first.
pub fn topological_order(g: &RotationDigraph) -> Result<Vec<usize>, PosetError> {
    let n = g.len();
    let mut indeg: Vec<usize> = (0..n).map(|v| g.predecessors(v).len()).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for &s in g.successors(v) {
            indeg[s] -= 1;
            if indeg[s] == 0 {
                ready.push(Reverse(s));
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| indeg[v] > 0).expect("some vertex is left");
        return Err(PosetError::Cyclic(stuck));
    }
    Ok(order)
}

pub fn is_closed(g: &RotationDigraph, set: &ClosedSet) -> bool {
    check_closed(g, set).is_ok()
}

fn check_closed(g: &RotationDigraph, set: &ClosedSet) -> Result<(), PosetError> {
    for &r in set.members() {
        if r >= g.len() {
            return Err(PosetError::OutOfRange(r));
        }
        if let Some(&missing) = g.predecessors(r).iter().find(|&&p| !set.contains(p)) {
            return Err(PosetError::NotClosed {
                rotation: r,
                missing,
            });
        }
    }
    Ok(())
}

/// Every closed set of `g`, each exactly once, starting with the empty set.
///
/// Walks a topological order deciding each rotation in turn, trying
/// "leave out" before "take". A rotation can be taken once all its
/// predecessors are, and leaving out everything that follows always
/// completes a closed set, so no branch is wasted: the delay between two
/// outputs is linear in the number of rotations and edges.
///
/// With `cap = Some(k)` at most `k` sets are produced; [`ClosedSets::truncated`]
/// then reports whether more existed.
pub fn enumerate_closed_sets(
    g: &RotationDigraph,
    cap: Option<usize>,
) -> Result<ClosedSets<'_>, PosetError> {
    let order = topological_order(g)?;
    Ok(ClosedSets {
        g,
        included: vec![false; order.len()],
        order,
        taken: Vec::new(),
        started: false,
        done: false,
        cap,
        emitted: 0,
        truncated: false,
    })
}

pub struct ClosedSets<'a> {
    g: &'a RotationDigraph,
    order: Vec<usize>,
    included: Vec<bool>,
    /// Decision per depth along the current branch.
    taken: Vec<bool>,
    started: bool,
    done: bool,
    cap: Option<usize>,
    emitted: usize,
    truncated: bool,
}

impl ClosedSets<'_> {
    /// True when the cap stopped the enumeration before the last set.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn can_take(&self, r: usize) -> bool {
        self.g.predecessors(r).iter().all(|&p| self.included[p])
    }

    fn advance(&mut self) -> bool {
        if !self.started {
            self.started = true;
            self.taken = vec![false; self.order.len()];
            return true;
        }
        while let Some(took) = self.taken.pop() {
            let r = self.order[self.taken.len()];
            if took {
                self.included[r] = false;
            } else if self.can_take(r) {
                self.included[r] = true;
                self.taken.push(true);
                self.taken.resize(self.order.len(), false);
                return true;
            }
        }
        false
    }

    fn current(&self) -> ClosedSet {
        ClosedSet(
            (0..self.included.len())
                .filter(|&r| self.included[r])
                .collect(),
        )
    }
}

impl Iterator for ClosedSets<'_> {
    type Item = ClosedSet;

    fn next(&mut self) -> Option<ClosedSet> {
        if self.done {
            return None;
        }
        let more = self.advance();
        if !more {
            self.done = true;
            return None;
        }
        if self.cap.is_some_and(|k| self.emitted >= k) {
            self.truncated = true;
            self.done = true;
            return None;
        }
        self.emitted += 1;
        Some(self.current())
    }
}

/// The stable matching reached by eliminating the rotations of `set` from
/// the man-optimal matching.
pub fn matching_of(g: &RotationDigraph, set: &ClosedSet) -> Result<Matching, PosetError> {
    check_closed(g, set)?;
    let order: Vec<usize> = topological_order(g)?
        .into_iter()
        .filter(|&r| set.contains(r))
        .collect();
    matching_of_order(g, &order)
}

/// Eliminates rotations in the given order; each must be exposed when its
/// turn comes.
pub fn matching_of_order(g: &RotationDigraph, order: &[usize]) -> Result<Matching, PosetError> {
    let mut mu = g.man_optimal().clone();
    for &r in order {
        let rho = g.rotations().get(r).ok_or(PosetError::OutOfRange(r))?;
        mu = eliminate(&mu, rho)?;
    }
    Ok(mu)
}

/// The closed set whose matching is `mu`.
///
/// A rotation has been eliminated exactly when its first woman holds a man
/// she likes at least as much as the one it gives her.
pub fn closed_set_of(
    inst: &Instance,
    g: &RotationDigraph,
    mu: &Matching,
) -> Result<ClosedSet, PosetError> {
    if !is_stable(inst, mu)?.is_empty() {
        return Err(PosetError::Unstable);
    }
    let set = ClosedSet::new(g.rotations().iter().enumerate().filter_map(|(r, rho)| {
        let (w, _, to) = rho.woman_moves().next().expect("rotations are non-empty");
        let rank_now = mu.husband(w).and_then(|m| inst.woman_rank(w, m));
        let rank_to = inst.woman_rank(w, to);
        match (rank_now, rank_to) {
            (Some(a), Some(b)) if a <= b => Some(r),
            _ => None,
        }
    }));
    match matching_of(g, &set) {
        Ok(back) if &back == mu => Ok(set),
        _ => Err(PosetError::NotInLattice),
    }
}

pub fn is_topological_sort(g: &RotationDigraph, seq: &[usize]) -> bool {
    let n = g.len();
    if seq.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &r) in seq.iter().enumerate() {
        if r >= n || pos[r] != usize::MAX {
            return false;
        }
        pos[r] = i;
    }
    g.edges().iter().all(|&(a, b, _)| pos[a] < pos[b])
}

/// All topological orders, up to `cap`. The flag reports truncation.
///
/// Each one is an elimination sequence from the man-optimal to the
/// woman-optimal matching, so they correspond to the maximal chains of the
/// lattice.
pub fn all_topological_sorts(
    g: &RotationDigraph,
    cap: Option<usize>,
) -> Result<(Vec<Vec<usize>>, bool), PosetError> {
    topological_order(g)?;
    let n = g.len();
    let mut indeg: Vec<usize> = (0..n).map(|v| g.predecessors(v).len()).collect();
    let mut used = vec![false; n];
    let mut prefix = Vec::with_capacity(n);
    let mut out = Vec::new();
    let mut truncated = false;

    fn rec(
        g: &RotationDigraph,
        indeg: &mut [usize],
        used: &mut [bool],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: Option<usize>,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        if prefix.len() == used.len() {
            if cap.is_some_and(|k| out.len() >= k) {
                *truncated = true;
            } else {
                out.push(prefix.clone());
            }
            return;
        }
        for v in 0..used.len() {
            if used[v] || indeg[v] > 0 {
                continue;
            }
            used[v] = true;
            prefix.push(v);
            for &s in g.successors(v) {
                indeg[s] -= 1;
            }
            rec(g, indeg, used, prefix, out, cap, truncated);
            for &s in g.successors(v) {
                indeg[s] += 1;
            }
            prefix.pop();
            used[v] = false;
        }
    }

    rec(
        g,
        &mut indeg,
        &mut used,
        &mut prefix,
        &mut out,
        cap,
        &mut truncated,
    );
    Ok((out, truncated))
}

/// `reach[a][b]` when there is a non-empty path from `a` to `b`.
pub fn transitive_closure(g: &RotationDigraph) -> Result<Vec<Vec<bool>>, PosetError> {
    let order = topological_order(g)?;
    let n = g.len();
    let mut reach = vec![vec![false; n]; n];
    for &v in order.iter().rev() {
        for &s in g.successors(v) {
            reach[v][s] = true;
            let (row_v, row_s) = if v < s {
                let (lo, hi) = reach.split_at_mut(s);
                (&mut lo[v], &hi[0])
            } else {
                let (lo, hi) = reach.split_at_mut(v);
                (&mut hi[0], &lo[s])
            };
            for (x, &y) in row_v.iter_mut().zip(row_s.iter()) {
                *x |= y;
            }
        }
    }
    Ok(reach)
}

/// `[{"rotations": [1-based ids], "matching": [1-based wife per man or
/// null]}, ...]`.
pub fn closed_sets_json(g: &RotationDigraph, sets: &[ClosedSet]) -> Result<String, PosetError> {
    #[derive(Serialize)]
    struct Entry {
        rotations: Vec<usize>,
        matching: Vec<Option<usize>>,
    }
    let mut entries = Vec::with_capacity(sets.len());
    for s in sets {
        let mu = matching_of(g, s)?;
        entries.push(Entry {
            rotations: s.members().iter().map(|r| r + 1).collect(),
            matching: mu.man_partners().iter().map(|w| w.map(|w| w + 1)).collect(),
        });
    }
    Ok(serde_json::to_string_pretty(&entries).expect("closed sets serialize"))
}

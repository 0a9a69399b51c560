//! Order-theoretic operations on stable matchings and a brute-force oracle
//! that lists every stable matching of a small instance.
//!
//! The oracle only relies on [`Instance`] and [`Matching`]; it shares no
//! code with deferred acceptance or the rotation machinery, which it is
//! used to check.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::Serialize;
use thiserror::Error;

use crate::instance::{AgentId, Instance};
use crate::matching::{Matching, MatchingError};

/// Instances with more agents per side than this are refused by the oracle
/// unless the guard is lifted.
pub const DEFAULT_ORACLE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("matching {0} is not stable")]
    Unstable(Matching),
    #[error("combining the two matchings does not give a matching")]
    NotAMatching,
    #[error("instance has {size} agents per side; the oracle is limited to {limit}")]
    TooLarge { size: usize, limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BlockingPair {
    pub man: AgentId,
    pub woman: AgentId,
}

/// All blocking pairs of `mu`: mutually acceptable, unmatched together, and
/// each strictly preferring the other to their assignment. Empty iff stable.
pub fn is_stable(inst: &Instance, mu: &Matching) -> Result<Vec<BlockingPair>, MatchingError> {
    mu.validate(inst)?;
    let mut out = Vec::new();
    for m in 0..inst.num_men() {
        let wife = mu.wife(m);
        for &w in inst.man_list(m) {
            if wife == Some(w) {
                // Everyone after his wife is worse for him.
                break;
            }
            if inst.woman_rank(w, m).is_some() && inst.woman_prefers(w, Some(m), mu.husband(w)) {
                out.push(BlockingPair {
                    man: AgentId::man(m),
                    woman: AgentId::woman(w),
                });
            }
        }
    }
    Ok(out)
}

fn ensure_stable(inst: &Instance, mu: &Matching) -> Result<(), LatticeError> {
    if is_stable(inst, mu)?.is_empty() {
        Ok(())
    } else {
        Err(LatticeError::Unstable(mu.clone()))
    }
}

/// Outcome of comparing two matchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Equal,
    AboveStrict,
    BelowStrict,
    Incomparable,
}

impl Dominance {
    pub fn reversed(self) -> Dominance {
        match self {
            Dominance::AboveStrict => Dominance::BelowStrict,
            Dominance::BelowStrict => Dominance::AboveStrict,
            d => d,
        }
    }
}

fn compare_side(
    partners_a: &[Option<usize>],
    partners_b: &[Option<usize>],
    prefers: impl Fn(usize, Option<usize>, Option<usize>) -> bool,
) -> Dominance {
    let (mut above, mut below) = (false, false);
    for (agent, (&pa, &pb)) in partners_a.iter().zip(partners_b).enumerate() {
        match (pa, pb) {
            (None, None) => {}
            (Some(_), None) | (None, Some(_)) => return Dominance::Incomparable,
            (Some(x), Some(y)) if x == y => {}
            _ => {
                if prefers(agent, pa, pb) {
                    above = true;
                } else {
                    below = true;
                }
            }
        }
    }
    match (above, below) {
        (false, false) => Dominance::Equal,
        (true, false) => Dominance::AboveStrict,
        (false, true) => Dominance::BelowStrict,
        (true, true) => Dominance::Incomparable,
    }
}

/// Compares `a` with `b` under woman-dominance: `AboveStrict` when every
/// woman weakly prefers her partner in `a` and one strictly does. Matchings
/// with different matched sets are `Incomparable`.
///
/// Inputs are checked for stability in debug builds.
pub fn dominance(inst: &Instance, a: &Matching, b: &Matching) -> Result<Dominance, LatticeError> {
    if cfg!(debug_assertions) {
        ensure_stable(inst, a)?;
        ensure_stable(inst, b)?;
    }
    Ok(compare_side(
        a.woman_partners(),
        b.woman_partners(),
        |w, x, y| inst.woman_prefers(w, x, y),
    ))
}

/// Same comparison from the men's side.
pub fn man_dominance(inst: &Instance, a: &Matching, b: &Matching) -> Dominance {
    compare_side(a.man_partners(), b.man_partners(), |m, x, y| {
        inst.man_prefers(m, x, y)
    })
}

fn combine(
    inst: &Instance,
    a: &Matching,
    b: &Matching,
    better: bool,
) -> Result<Matching, LatticeError> {
    if cfg!(debug_assertions) {
        ensure_stable(inst, a)?;
        ensure_stable(inst, b)?;
    }
    let partners: Vec<Option<usize>> = (0..inst.num_women())
        .map(|w| {
            let (x, y) = (a.husband(w), b.husband(w));
            if inst.woman_prefers(w, x, y) == better {
                x
            } else {
                y
            }
        })
        .collect();
    Matching::from_woman_partners(inst.num_men(), &partners).map_err(|_| LatticeError::NotAMatching)
}

/// Each woman takes the partner she prefers.
pub fn join(inst: &Instance, a: &Matching, b: &Matching) -> Result<Matching, LatticeError> {
    combine(inst, a, b, true)
}

/// Each woman takes the partner she likes less.
pub fn meet(inst: &Instance, a: &Matching, b: &Matching) -> Result<Matching, LatticeError> {
    combine(inst, a, b, false)
}

/// Every stable matching of an instance, ordered by woman-dominance.
#[derive(Debug, Clone)]
pub struct StableLattice {
    pub matchings: Vec<Matching>,
    /// `above[i][j]` iff `matchings[i]` strictly woman-dominates `matchings[j]`.
    pub above: Vec<Vec<bool>>,
    /// The man-optimal element.
    pub bottom: usize,
    /// The woman-optimal element.
    pub top: usize,
    /// `(lower, upper)` pairs where `upper` covers `lower`.
    pub cover_edges: Vec<(usize, usize)>,
}

impl StableLattice {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn index_of(&self, mu: &Matching) -> Option<usize> {
        self.matchings.iter().position(|x| x == mu)
    }

    /// Elements covering element `i`.
    pub fn upper_covers(&self, i: usize) -> Vec<usize> {
        self.cover_edges
            .iter()
            .filter(|&&(lo, _)| lo == i)
            .map(|&(_, hi)| hi)
            .collect()
    }

    /// `(man, woman)` pairs matched in at least one stable matching.
    pub fn stable_pairs(&self) -> BTreeSet<(usize, usize)> {
        self.matchings.iter().flat_map(|mu| mu.pairs()).collect()
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            matchings: Vec<Vec<Option<usize>>>,
            bottom: usize,
            top: usize,
            cover_edges: Vec<[usize; 2]>,
        }
        let doc = Doc {
            matchings: self
                .matchings
                .iter()
                .map(|mu| mu.man_partners().iter().map(|w| w.map(|w| w + 1)).collect())
                .collect(),
            bottom: self.bottom + 1,
            top: self.top + 1,
            cover_edges: self
                .cover_edges
                .iter()
                .map(|&(a, b)| [a + 1, b + 1])
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("lattice serializes")
    }

    /// Hasse diagram with the man-optimal matching at the bottom.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, mu) in self.matchings.iter().enumerate() {
            let _ = writeln!(out, "  s{} [label=\"{}\"];", i + 1, mu.compact());
        }
        for &(lo, hi) in &self.cover_edges {
            let _ = writeln!(out, "  s{} -> s{};", lo + 1, hi + 1);
        }
        out.push_str("}\n");
        out
    }
}

/// Brute-force enumeration with the default size guard.
pub fn enumerate_stable_bruteforce(inst: &Instance) -> Result<StableLattice, LatticeError> {
    enumerate_stable_bruteforce_with(inst, Some(DEFAULT_ORACLE_LIMIT))
}

/// Enumerates every matching of the mutual-acceptability graph by
/// backtracking over the men in index order (each acceptable woman, then
/// single), keeps the stable ones and computes the dominance order.
/// `limit = None` lifts the size guard.
pub fn enumerate_stable_bruteforce_with(
    inst: &Instance,
    limit: Option<usize>,
) -> Result<StableLattice, LatticeError> {
    if let Some(limit) = limit {
        if inst.size() > limit {
            return Err(LatticeError::TooLarge {
                size: inst.size(),
                limit,
            });
        }
    }
    let mut search = Search {
        inst,
        wife: vec![None; inst.num_men()],
        husband: vec![None; inst.num_women()],
        found: Vec::new(),
    };
    search.run(0);
    let matchings = search.found;

    let n = matchings.len();
    let cmp: Vec<Vec<Dominance>> = matchings
        .iter()
        .map(|a| {
            matchings
                .iter()
                .map(|b| {
                    compare_side(a.woman_partners(), b.woman_partners(), |w, x, y| {
                        inst.woman_prefers(w, x, y)
                    })
                })
                .collect()
        })
        .collect();
    let above: Vec<Vec<bool>> = cmp
        .iter()
        .map(|row| row.iter().map(|&d| d == Dominance::AboveStrict).collect())
        .collect();
    let bottom = (0..n)
        .find(|&i| (0..n).all(|j| i == j || above[j][i]))
        .expect("a stable lattice has a least element");
    let top = (0..n)
        .find(|&i| (0..n).all(|j| i == j || above[i][j]))
        .expect("a stable lattice has a greatest element");
    let mut cover_edges = Vec::new();
    for lo in 0..n {
        for hi in 0..n {
            if above[hi][lo] && !(0..n).any(|c| above[hi][c] && above[c][lo]) {
                cover_edges.push((lo, hi));
            }
        }
    }
    Ok(StableLattice {
        matchings,
        above,
        bottom,
        top,
        cover_edges,
    })
}

struct Search<'a> {
    inst: &'a Instance,
    wife: Vec<Option<usize>>,
    husband: Vec<Option<usize>>,
    found: Vec<Matching>,
}

impl Search<'_> {
    fn run(&mut self, m: usize) {
        let inst = self.inst;
        if m == inst.num_men() {
            let mu = Matching::from_man_partners(inst.num_women(), &self.wife)
                .expect("search builds matchings");
            if is_stable(inst, &mu)
                .expect("search pairs acceptable agents")
                .is_empty()
            {
                self.found.push(mu);
            }
            return;
        }
        for &w in inst.man_list(m) {
            if self.husband[w].is_some() || inst.woman_rank(w, m).is_none() {
                continue;
            }
            self.wife[m] = Some(w);
            self.husband[w] = Some(m);
            if self.consistent(m) {
                self.run(m + 1);
            }
            self.husband[w] = None;
            self.wife[m] = None;
        }
        if self.consistent(m) {
            self.run(m + 1);
        }
    }

    /// No blocking pair among agents whose partners are already final:
    /// men `0..=m` and the women they hold.
    fn consistent(&self, m: usize) -> bool {
        let inst = self.inst;
        let mine = self.wife[m];
        for &w in inst.man_list(m) {
            if Some(w) == mine {
                break;
            }
            if let Some(h) = self.husband[w] {
                if inst.woman_prefers(w, Some(m), Some(h)) {
                    return false;
                }
            }
        }
        if let Some(w) = mine {
            for &other in inst.woman_list(w) {
                if other == m {
                    break;
                }
                if other < m
                    && inst.man_rank(other, w).is_some()
                    && inst.man_prefers(other, Some(w), self.wife[other])
                {
                    return false;
                }
            }
        }
        true
    }
}

/// Every bottom-to-top path along cover edges, as lists of element indices.
pub fn maximal_chains(lat: &StableLattice) -> Vec<Vec<usize>> {
    fn walk(lat: &StableLattice, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let cur = *path.last().expect("path starts at bottom");
        if cur == lat.top {
            out.push(path.clone());
            return;
        }
        for next in lat.upper_covers(cur) {
            path.push(next);
            walk(lat, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    walk(lat, &mut vec![lat.bottom], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::testutil::men;

    #[test]
    fn man_optimal_is_stable() {
        let inst = fixtures::poset6();
        assert!(is_stable(&inst, &men("123456")).unwrap().is_empty());
    }

    #[test]
    fn empty_matching_is_blocked_by_every_acceptable_pair() {
        let inst = fixtures::poset6();
        let blocking = is_stable(&inst, &Matching::empty_for(&inst)).unwrap();
        assert_eq!(blocking.len(), inst.acceptable_pairs().len());
        assert_eq!(blocking.len(), 15);

        let one = Instance::from_lists(vec![vec![0]], vec![vec![0]]).unwrap();
        assert_eq!(
            is_stable(&one, &Matching::empty(1, 1)).unwrap(),
            vec![BlockingPair {
                man: AgentId::man(0),
                woman: AgentId::woman(0)
            }]
        );
    }

    #[test]
    fn unacceptable_pair_is_an_error() {
        let inst = fixtures::poset6();
        let mu = Matching::from_pairs(6, 6, [(0, 5)]).unwrap();
        assert!(matches!(
            is_stable(&inst, &mu),
            Err(MatchingError::Unacceptable { .. })
        ));
        assert!(matches!(
            is_stable(&inst, &Matching::empty(5, 6)),
            Err(MatchingError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn dominance_on_six_by_six() {
        let inst = fixtures::poset6();
        let d = |a, b| dominance(&inst, &men(a), &men(b)).unwrap();
        assert_eq!(d("213456", "123456"), Dominance::AboveStrict);
        assert_eq!(d("123456", "213456"), Dominance::BelowStrict);
        assert_eq!(d("214536", "214536"), Dominance::Equal);
        assert_eq!(d("213456", "124536"), Dominance::Incomparable);
        assert!(matches!(
            dominance(&inst, &Matching::empty_for(&inst), &men("123456")),
            Err(LatticeError::Unstable(_))
        ));
    }

    #[test]
    fn join_and_meet_on_six_by_six() {
        let inst = fixtures::poset6();
        let (a, b) = (men("213456"), men("124536"));
        assert_eq!(join(&inst, &a, &b).unwrap(), men("214536"));
        assert_eq!(meet(&inst, &a, &b).unwrap(), men("123456"));
        assert_eq!(join(&inst, &a, &a).unwrap(), a);
        assert_eq!(meet(&inst, &b, &b).unwrap(), b);
    }

    #[test]
    fn oracle_on_fixtures() {
        let lat = enumerate_stable_bruteforce(&fixtures::poset6()).unwrap();
        let got: BTreeSet<_> = lat.matchings.iter().cloned().collect();
        let want: BTreeSet<_> = ["123456", "213456", "124536", "214536", "264531"]
            .into_iter()
            .map(men)
            .collect();
        assert_eq!(got, want);
        assert_eq!(lat.matchings[lat.bottom], men("123456"));
        assert_eq!(lat.matchings[lat.top], men("264531"));
        assert_eq!(lat.cover_edges.len(), 5);

        let lat = enumerate_stable_bruteforce(&fixtures::tricky5()).unwrap();
        let got: BTreeSet<_> = lat.matchings.iter().cloned().collect();
        let want: BTreeSet<_> = ["12345", "21345", "12534", "21534", "23154"]
            .into_iter()
            .map(men)
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn oracle_size_guard() {
        let inst = crate::instance::gen_random(9, 0.3, 1).unwrap();
        assert_eq!(
            enumerate_stable_bruteforce(&inst).unwrap_err(),
            LatticeError::TooLarge { size: 9, limit: 8 }
        );
        assert!(enumerate_stable_bruteforce_with(&inst, None).is_ok());
    }

    #[test]
    fn two_blocks_give_a_square() {
        let lat =
            enumerate_stable_bruteforce(&crate::instance::gen_exponential(2).unwrap()).unwrap();
        assert_eq!(lat.len(), 4);
        assert_eq!(lat.cover_edges.len(), 4);
        assert_eq!(maximal_chains(&lat).len(), 2);
    }

    #[test]
    fn chains() {
        let lat = enumerate_stable_bruteforce(&fixtures::poset6()).unwrap();
        let chains = maximal_chains(&lat);
        assert_eq!(chains.len(), 2);
        let middle = lat.index_of(&men("214536")).unwrap();
        for c in &chains {
            assert_eq!(c.len(), 4);
            assert!(c.contains(&middle));
        }

        let one = Instance::from_lists(vec![vec![0]], vec![vec![0]]).unwrap();
        let lat = enumerate_stable_bruteforce(&one).unwrap();
        assert_eq!(maximal_chains(&lat), vec![vec![0]]);

        let lat =
            enumerate_stable_bruteforce(&crate::instance::gen_exponential(3).unwrap()).unwrap();
        assert_eq!(maximal_chains(&lat).len(), 6);
    }

    #[test]
    fn exports() {
        let lat = enumerate_stable_bruteforce(&fixtures::chain3()).unwrap();
        let json: serde_json::Value = serde_json::from_str(&lat.to_json()).unwrap();
        assert_eq!(json["matchings"].as_array().unwrap().len(), lat.len());
        assert!(lat.to_dot().starts_with("digraph lattice {"));
    }
}

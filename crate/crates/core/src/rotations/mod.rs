//! Rotations: the minimal steps between consecutive stable matchings, and
//! the predecessor digraph over all of them.

mod build;
mod labels;

use std::collections::BTreeSet;
use std::fmt::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::da::{rejection_chain, DaError};
use crate::instance::{AgentId, Instance};
use crate::lattice::is_stable;
use crate::matching::{Matching, MatchingError};

pub use build::{find_rotation_graph, find_rotation_graph_with, RotationAnalysis, WomanSelection};
pub use labels::{gi_predecessor_edges, LabelVariant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("a rotation needs at least two pairs")]
    TooShort,
    #[error("{0} appears twice in one rotation")]
    RepeatedAgent(AgentId),
    #[error("rotation {rotation} is not exposed: {woman} is not matched to {man}")]
    NotExposed {
        rotation: String,
        woman: AgentId,
        man: AgentId,
    },
    #[error("matching is not stable")]
    Unstable,
    #[error("rotation list does not fit the instance: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

impl From<DaError> for RotationError {
    fn from(e: DaError) -> Self {
        match e {
            DaError::Matching(m) => RotationError::Matching(m),
            other => RotationError::Inconsistent(other.to_string()),
        }
    }
}

/// A cyclic list of `(woman, man)` pairs. Eliminating it moves each man
/// `m_i` to the next woman `w_{i+1}`, so each woman `w_i` ends up with the
/// previous man `m_{i-1}`.
///
/// Stored rotated so that the smallest man index comes first; cyclic shifts
/// of the same cycle compare equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rotation {
    pairs: Vec<(usize, usize)>,
}

impl Rotation {
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self, RotationError> {
        if pairs.len() < 2 {
            return Err(RotationError::TooShort);
        }
        let mut men = BTreeSet::new();
        let mut women = BTreeSet::new();
        for &(w, m) in &pairs {
            if !women.insert(w) {
                return Err(RotationError::RepeatedAgent(AgentId::woman(w)));
            }
            if !men.insert(m) {
                return Err(RotationError::RepeatedAgent(AgentId::man(m)));
            }
        }
        let lead = (0..pairs.len())
            .min_by_key(|&i| pairs[i].1)
            .expect("non-empty");
        pairs.rotate_left(lead);
        Ok(Rotation { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(man, from, to)` for each man the rotation moves.
    pub fn man_moves(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.pairs.len();
        (0..k).map(move |i| (self.pairs[i].1, self.pairs[i].0, self.pairs[(i + 1) % k].0))
    }

    /// `(woman, from, to)` for each woman the rotation moves.
    pub fn woman_moves(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let k = self.pairs.len();
        (0..k).map(move |i| {
            (
                self.pairs[i].0,
                self.pairs[i].1,
                self.pairs[(i + k - 1) % k].1,
            )
        })
    }

    /// The cycle that undoes this rotation: eliminating it after `self`
    /// restores the original matching.
    pub fn reversed(&self) -> Rotation {
        let k = self.pairs.len();
        let pairs = (0..k)
            .rev()
            .map(|i| (self.pairs[(i + 1) % k].0, self.pairs[i].1))
            .collect();
        Rotation::new(pairs).expect("reversal keeps agents distinct")
    }

    /// `w1m1→w2m2→…`, 1-based.
    pub fn label(&self) -> String {
        self.pairs
            .iter()
            .map(|&(w, m)| format!("w{}m{}", w + 1, m + 1))
            .collect::<Vec<_>>()
            .join("→")
    }
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rotation[{}]", self.label())
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pairs
            .iter()
            .map(|&(w, m)| format!("(w{},m{})", w + 1, m + 1))
            .collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Eliminates `rho` from `mu`. Requires `mu(w_i) = m_i` for every pair.
pub fn eliminate(mu: &Matching, rho: &Rotation) -> Result<Matching, RotationError> {
    for &(w, m) in rho.pairs() {
        if w >= mu.num_women() || mu.husband(w) != Some(m) {
            return Err(RotationError::NotExposed {
                rotation: rho.to_string(),
                woman: AgentId::woman(w),
                man: AgentId::man(m),
            });
        }
    }
    let mut out = mu.clone();
    for (m, _, to) in rho.man_moves() {
        out.pair(m, to);
    }
    Ok(out)
}

/// Rotations exposed in the stable matching `mu`, in canonical order.
///
/// Runs the rejection chain of every matched woman and keeps those that
/// close at their start with at most one good proposal per woman.
pub fn exposed_rotations(inst: &Instance, mu: &Matching) -> Result<Vec<Rotation>, RotationError> {
    if !is_stable(inst, mu)?.is_empty() {
        return Err(RotationError::Unstable);
    }
    let mut found = BTreeSet::new();
    for w in 0..inst.num_women() {
        if mu.husband(w).is_none() {
            continue;
        }
        let chain = rejection_chain(inst, mu, w)?;
        if chain.is_covering() {
            found.insert(Rotation::new(chain.entries)?);
        }
    }
    Ok(found.into_iter().collect())
}

/// Why one rotation must precede another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeType {
    /// The predecessor moves a man to the woman the successor moves him from.
    Type1,
    /// The predecessor moves a woman above a man whom the successor moves
    /// below her.
    Type2,
}

impl EdgeType {
    pub fn number(self) -> u8 {
        match self {
            EdgeType::Type1 => 1,
            EdgeType::Type2 => 2,
        }
    }
}

/// Rotations plus typed predecessor edges `(from, to, type)`.
///
/// An edge may be present with both types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationDigraph {
    man_optimal: Matching,
    rotations: Vec<Rotation>,
    edges: BTreeSet<(usize, usize, EdgeType)>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    moves: Vec<Vec<usize>>,
    labels: Vec<Vec<Option<usize>>>,
}

impl RotationDigraph {
    /// Assembles a digraph rooted at `man_optimal`. Edge endpoints must be
    /// rotation indices.
    pub fn new(
        man_optimal: Matching,
        rotations: Vec<Rotation>,
        edges: impl IntoIterator<Item = (usize, usize, EdgeType)>,
    ) -> Self {
        let mut moves = vec![Vec::new(); man_optimal.num_men()];
        for (i, rho) in rotations.iter().enumerate() {
            for &(_, m) in rho.pairs() {
                moves[m].push(i);
            }
        }
        Self::from_parts(
            man_optimal,
            rotations,
            edges.into_iter().collect(),
            moves,
            Vec::new(),
        )
    }

    fn from_parts(
        man_optimal: Matching,
        rotations: Vec<Rotation>,
        edges: BTreeSet<(usize, usize, EdgeType)>,
        moves: Vec<Vec<usize>>,
        labels: Vec<Vec<Option<usize>>>,
    ) -> Self {
        let n = rotations.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b, _) in &edges {
            assert!(a < n && b < n, "edge ({a}, {b}) outside {n} rotations");
            if !preds[b].contains(&a) {
                preds[b].push(a);
                succs[a].push(b);
            }
        }
        RotationDigraph {
            man_optimal,
            rotations,
            edges,
            preds,
            succs,
            moves,
            labels,
        }
    }

    pub fn man_optimal(&self) -> &Matching {
        &self.man_optimal
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize, EdgeType)> {
        &self.edges
    }

    /// Distinct `(from, to)` pairs regardless of type.
    pub fn untyped_edges(&self) -> BTreeSet<(usize, usize)> {
        self.edges.iter().map(|&(a, b, _)| (a, b)).collect()
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.preds[v]
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succs[v]
    }

    /// Rotations moving man `m`, in the order they were found.
    pub fn moves_of(&self, m: usize) -> &[usize] {
        &self.moves[m]
    }

    /// The rotation that moved woman `w` from below to above the man at
    /// position `pos` on her list, when recorded during construction.
    pub fn label(&self, w: usize, pos: usize) -> Option<usize> {
        self.labels
            .get(w)
            .and_then(|l| l.get(pos))
            .copied()
            .flatten()
    }

    pub fn index_of(&self, rho: &Rotation) -> Option<usize> {
        self.rotations.iter().position(|r| r == rho)
    }

    /// `{"rotations": [{"id", "pairs": [[woman, man], ...]}], "edges":
    /// [{"from", "to", "type"}]}` with 1-based indices.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct RotationJson {
            id: usize,
            pairs: Vec<[usize; 2]>,
        }
        #[derive(Serialize)]
        struct EdgeJson {
            from: usize,
            to: usize,
            #[serde(rename = "type")]
            kind: u8,
        }
        #[derive(Serialize)]
        struct Doc {
            rotations: Vec<RotationJson>,
            edges: Vec<EdgeJson>,
        }
        let doc = Doc {
            rotations: self
                .rotations
                .iter()
                .enumerate()
                .map(|(i, r)| RotationJson {
                    id: i + 1,
                    pairs: r.pairs().iter().map(|&(w, m)| [w + 1, m + 1]).collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b, t)| EdgeJson {
                    from: a + 1,
                    to: b + 1,
                    kind: t.number(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("digraph serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rotations {\n  node [shape=box];\n");
        for (i, r) in self.rotations.iter().enumerate() {
            let _ = writeln!(out, "  r{} [label=\"{}\"];", i + 1, r.label());
        }
        for &(a, b, t) in &self.edges {
            let n = t.number();
            let _ = writeln!(out, "  r{} -> r{} [type={n}, label=\"{n}\"];", a + 1, b + 1);
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::testutil::men;

    fn rot(pairs: &[(usize, usize)]) -> Rotation {
        Rotation::new(pairs.iter().map(|&(w, m)| (w - 1, m - 1)).collect()).unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = rot(&[(4, 4), (5, 5), (3, 3)]);
        let b = rot(&[(3, 3), (4, 4), (5, 5)]);
        assert_eq!(a, b);
        assert_eq!(a.pairs()[0], (2, 2));
        assert_eq!(Rotation::new(vec![(0, 0)]), Err(RotationError::TooShort));
        assert_eq!(
            Rotation::new(vec![(0, 0), (0, 1)]),
            Err(RotationError::RepeatedAgent(AgentId::woman(0)))
        );
    }

    #[test]
    fn elimination() {
        let rho1 = rot(&[(1, 1), (2, 2)]);
        assert_eq!(eliminate(&men("123456"), &rho1).unwrap(), men("213456"));
        let rho3 = rot(&[(1, 2), (6, 6)]);
        assert_eq!(eliminate(&men("214536"), &rho3).unwrap(), men("264531"));
        assert!(matches!(
            eliminate(&men("123456"), &rho3),
            Err(RotationError::NotExposed { .. })
        ));
    }

    #[test]
    fn reversal_restores() {
        let rho2 = rot(&[(3, 3), (4, 4), (5, 5)]);
        let mu = men("123456");
        let after = eliminate(&mu, &rho2).unwrap();
        assert_eq!(after, men("124536"));
        assert_eq!(eliminate(&after, &rho2.reversed()).unwrap(), mu);
    }

    #[test]
    fn moves() {
        let rho2 = rot(&[(3, 3), (4, 4), (5, 5)]);
        let men_moves: Vec<_> = rho2.man_moves().collect();
        assert_eq!(men_moves, vec![(2, 2, 3), (3, 3, 4), (4, 4, 2)]);
        let women_moves: Vec<_> = rho2.woman_moves().collect();
        assert_eq!(women_moves, vec![(2, 2, 4), (3, 3, 2), (4, 4, 3)]);
    }

    #[test]
    fn exposed_at_bottom_and_top() {
        let inst = fixtures::poset6();
        let exposed = exposed_rotations(&inst, &men("123456")).unwrap();
        assert_eq!(
            exposed,
            vec![rot(&[(1, 1), (2, 2)]), rot(&[(3, 3), (4, 4), (5, 5)])]
        );
        assert!(exposed_rotations(&inst, &men("264531")).unwrap().is_empty());
        assert_eq!(
            exposed_rotations(&inst, &Matching::empty_for(&inst)),
            Err(RotationError::Unstable)
        );
    }

    #[test]
    fn three_cycle_is_not_exposed() {
        let inst = fixtures::chain3();
        let exposed = exposed_rotations(&inst, &men("123")).unwrap();
        assert_eq!(exposed, vec![rot(&[(2, 2), (3, 3)])]);
    }

    #[test]
    fn json_and_dot() {
        let g = find_rotation_graph(&fixtures::poset6()).graph;
        let json: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(
            json["rotations"][0]["pairs"],
            serde_json::json!([[1, 1], [2, 2]])
        );
        assert_eq!(
            json["edges"],
            serde_json::json!([{"from": 1, "to": 3, "type": 1}, {"from": 2, "to": 3, "type": 2}])
        );
        let dot = g.to_dot();
        assert!(dot.contains("r1 [label=\"w1m1→w2m2\"]"));
        assert!(dot.contains("r2 -> r3 [type=2"));
    }
}

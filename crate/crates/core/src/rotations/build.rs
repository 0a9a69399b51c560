use std::collections::BTreeSet;

use crate::da::{mpda, ExecutionStats};
use crate::instance::Instance;
use crate::matching::Matching;

use super::{EdgeType, Rotation, RotationDigraph};

/// Which unfinished woman starts the next chain. The output does not
/// depend on the choice; the second option exists to check that.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WomanSelection {
    #[default]
    LowestIndex,
    HighestIndex,
}

#[derive(Debug, Clone)]
pub struct RotationAnalysis {
    pub graph: RotationDigraph,
    pub man_optimal: Matching,
    pub woman_optimal: Matching,
    pub stats: ExecutionStats,
}

pub fn find_rotation_graph(inst: &Instance) -> RotationAnalysis {
    find_rotation_graph_with(inst, WomanSelection::LowestIndex)
}

/// Finds every rotation and the predecessor digraph in one pass.
///
/// Starting from the man-optimal matching, a woman not yet at her best
/// partner rejects him and the freed men propose down their lists. A woman
/// only accepts someone she prefers to her current stable partner. When the
/// proposal chain returns to a woman already on it, the loop it closed is a
/// rotation and is eliminated at once; when it reaches a woman already at
/// her optimum, or a man runs out of women, every woman on the chain is at
/// her optimum too. Predecessors come from the last rotation that moved each
/// man (type 1) and from labels left on women's lists by earlier rotations
/// that the man had to skip (type 2).
///
/// `O(n^2)` on `n x n` instances: each man walks his list once.
pub fn find_rotation_graph_with(inst: &Instance, selection: WomanSelection) -> RotationAnalysis {
    let da = mpda(inst);
    let man_optimal = da.matching.clone();
    let mut b = Builder {
        inst,
        next: da.rejections.iter().map(Vec::len).collect(),
        stable: da.matching.woman_partners().to_vec(),
        working: da.matching.woman_partners().to_vec(),
        finished: da
            .matching
            .woman_partners()
            .iter()
            .map(Option::is_none)
            .collect(),
        on_chain: vec![None; inst.num_women()],
        chain: Vec::new(),
        pred1: vec![None; inst.num_men()],
        pred2: vec![Vec::new(); inst.num_men()],
        labels: (0..inst.num_women())
            .map(|w| vec![None; inst.woman_list(w).len()])
            .collect(),
        rotations: Vec::new(),
        edges: BTreeSet::new(),
        moves: vec![Vec::new(); inst.num_men()],
        stats: da.stats,
    };

    let n_w = inst.num_women();
    let mut remaining = b.finished.iter().filter(|f| !**f).count();
    let mut cursor = 0;
    while remaining > 0 {
        let start = match selection {
            WomanSelection::LowestIndex => {
                while b.finished[cursor] {
                    cursor += 1;
                }
                cursor
            }
            WomanSelection::HighestIndex => {
                while b.finished[n_w - 1 - cursor] {
                    cursor += 1;
                }
                n_w - 1 - cursor
            }
        };
        remaining -= b.run_chain(start);
    }

    let woman_optimal = Matching::from_woman_partners(inst.num_men(), &b.stable)
        .expect("stable partners are distinct");
    let graph =
        RotationDigraph::from_parts(man_optimal.clone(), b.rotations, b.edges, b.moves, b.labels);
    RotationAnalysis {
        graph,
        man_optimal,
        woman_optimal,
        stats: b.stats,
    }
}

struct Builder<'a> {
    inst: &'a Instance,
    /// Position on each man's list of the first woman who has not rejected
    /// him; the women before it are exactly the ones he can never get.
    next: Vec<usize>,
    /// The current stable matching, by woman.
    stable: Vec<Option<usize>>,
    /// Tentative partners along the open chain, by woman.
    working: Vec<Option<usize>>,
    /// Women already at their woman-optimal partner.
    finished: Vec<bool>,
    on_chain: Vec<Option<usize>>,
    /// `(woman, her stable partner when she joined)`.
    chain: Vec<(usize, usize)>,
    /// Last rotation that moved each man.
    pred1: Vec<Option<usize>>,
    /// Rotations whose labels the man skipped since he last became free.
    pred2: Vec<Vec<usize>>,
    /// Per woman and position on her list: the rotation that moved her from
    /// below that man to above him.
    labels: Vec<Vec<Option<usize>>>,
    rotations: Vec<Rotation>,
    edges: BTreeSet<(usize, usize, EdgeType)>,
    moves: Vec<Vec<usize>>,
    stats: ExecutionStats,
}

impl Builder<'_> {
    /// Runs one chain started by `start` rejecting her partner. Returns the
    /// number of women it finished.
    fn run_chain(&mut self, start: usize) -> usize {
        let first = self.stable[start].expect("unfinished women are matched");
        self.push(start, first);
        self.working[start] = None;
        self.reject(first);
        let mut m = first;

        loop {
            match self.next_accepting_woman(m) {
                Some(w) if !self.finished[w] => match self.on_chain[w] {
                    Some(pos) => {
                        let displaced = self.working[w].replace(m);
                        self.close_rotation(pos);
                        if self.chain.is_empty() {
                            return 0;
                        }
                        // He proposes again from where he stands.
                        m = displaced.expect("chain women other than the start hold a man");
                    }
                    None => {
                        let old = self.working[w].expect("unfinished women are matched");
                        self.push(w, old);
                        self.working[w] = Some(m);
                        self.reject(old);
                        m = old;
                    }
                },
                _ => {
                    let done = self.chain.len();
                    for (w, _) in std::mem::take(&mut self.chain) {
                        self.working[w] = self.stable[w];
                        self.on_chain[w] = None;
                        self.finished[w] = true;
                    }
                    return done;
                }
            }
        }
    }

    fn push(&mut self, w: usize, m: usize) {
        self.on_chain[w] = Some(self.chain.len());
        self.chain.push((w, m));
    }

    /// `m` loses his current woman and starts over with no skipped labels.
    fn reject(&mut self, m: usize) {
        self.next[m] += 1;
        self.stats.rejections += 1;
        self.pred2[m].clear();
    }

    /// The first woman from `m`'s position on who prefers him to her stable
    /// partner. Women passed over are dropped for good, collecting their
    /// labels as type-2 predecessors.
    fn next_accepting_woman(&mut self, m: usize) -> Option<usize> {
        let list = self.inst.man_list(m);
        while let Some(&w) = list.get(self.next[m]) {
            self.stats.proposals += 1;
            match self.inst.woman_rank(w, m) {
                Some(_) if self.inst.woman_prefers(w, Some(m), self.stable[w]) => return Some(w),
                pos => {
                    self.next[m] += 1;
                    self.stats.rejections += 1;
                    if let Some(rho) = pos.and_then(|p| self.labels[w][p]) {
                        self.pred2[m].push(rho);
                        self.stats.predecessor_edge_events += 1;
                    }
                }
            }
        }
        None
    }

    /// Eliminates the rotation formed by the chain from position `from` to
    /// its end. Each woman on it already holds her new partner in `working`.
    fn close_rotation(&mut self, from: usize) {
        let id = self.rotations.len();
        let pairs: Vec<(usize, usize)> = self.chain.drain(from..).collect();
        self.stats.rotation_events += 1;

        for &(w, m) in &pairs {
            self.on_chain[w] = None;
            self.stable[w] = self.working[w];
            if let Some(p) = self.pred1[m] {
                self.edges.insert((p, id, EdgeType::Type1));
                self.stats.predecessor_edge_events += 1;
            }
            for &p in &self.pred2[m] {
                self.edges.insert((p, id, EdgeType::Type2));
                self.stats.predecessor_edge_events += 1;
            }
        }
        for &(w, m) in &pairs {
            self.pred1[m] = Some(id);
            self.moves[m].push(id);
            // Men strictly between her new and old partner.
            let new = self.stable[w].expect("rotation women are matched");
            let lo = self.inst.woman_rank(w, new).expect("new partner is listed");
            let hi = self.inst.woman_rank(w, m).expect("old partner is listed");
            for slot in &mut self.labels[w][lo + 1..hi] {
                assert!(slot.is_none(), "label overwritten");
                *slot = Some(id);
                self.stats.predecessor_edge_events += 1;
            }
        }
        self.rotations
            .push(Rotation::new(pairs).expect("a closed chain is a rotation"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::instance::{gen_random, Instance};
    use crate::rotations::eliminate;
    use crate::rotations::exposed_rotations;
    use crate::testutil::men;

    fn rot(pairs: &[(usize, usize)]) -> Rotation {
        Rotation::new(pairs.iter().map(|&(w, m)| (w - 1, m - 1)).collect()).unwrap()
    }

    #[test]
    fn poset6_rotations_and_edges() {
        let a = find_rotation_graph(&fixtures::poset6());
        let g = &a.graph;
        let rotations: BTreeSet<_> = g.rotations().iter().cloned().collect();
        let expected: BTreeSet<_> = [
            rot(&[(1, 1), (2, 2)]),
            rot(&[(3, 3), (4, 4), (5, 5)]),
            rot(&[(1, 2), (6, 6)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(rotations, expected);
        let r1 = g.index_of(&rot(&[(1, 1), (2, 2)])).unwrap();
        let r2 = g.index_of(&rot(&[(3, 3), (4, 4), (5, 5)])).unwrap();
        let r3 = g.index_of(&rot(&[(1, 2), (6, 6)])).unwrap();
        let edges: BTreeSet<_> = [(r1, r3, EdgeType::Type1), (r2, r3, EdgeType::Type2)]
            .into_iter()
            .collect();
        assert_eq!(g.edges(), &edges);
        assert_eq!(a.man_optimal, men("123456"));
        assert_eq!(a.woman_optimal, men("264531"));
    }

    #[test]
    fn tricky5_edges_are_type1() {
        let g = find_rotation_graph(&fixtures::tricky5()).graph;
        assert_eq!(g.len(), 3);
        let r1 = g.index_of(&rot(&[(1, 1), (2, 2)])).unwrap();
        let r2 = g.index_of(&rot(&[(3, 3), (5, 5), (4, 4)])).unwrap();
        let r3 = g.index_of(&rot(&[(1, 2), (3, 4), (5, 3)])).unwrap();
        let edges: BTreeSet<_> = [(r1, r3, EdgeType::Type1), (r2, r3, EdgeType::Type1)]
            .into_iter()
            .collect();
        assert_eq!(g.edges(), &edges);
    }

    #[test]
    fn chain3_rotations_form_a_chain() {
        let a = find_rotation_graph(&fixtures::chain3());
        assert_eq!(
            a.graph.rotations(),
            &[rot(&[(2, 2), (3, 3)]), rot(&[(1, 1), (2, 3)])]
        );
        let edges: BTreeSet<_> = [(0, 1, EdgeType::Type1)].into_iter().collect();
        assert_eq!(a.graph.edges(), &edges);
        assert_eq!(a.woman_optimal, men("231"));
    }

    #[test]
    fn unique_stable_matching() {
        let inst = Instance::from_lists(vec![vec![0], vec![1]], vec![vec![0], vec![1]]).unwrap();
        let a = find_rotation_graph(&inst);
        assert!(a.graph.is_empty());
        assert_eq!(a.man_optimal, a.woman_optimal);
    }

    #[test]
    fn selection_order_does_not_matter() {
        for seed in 0..200 {
            let inst = gen_random(7, if seed % 2 == 0 { 1.0 } else { 0.5 }, seed).unwrap();
            let lo = find_rotation_graph_with(&inst, WomanSelection::LowestIndex).graph;
            let hi = find_rotation_graph_with(&inst, WomanSelection::HighestIndex).graph;
            let key = |g: &RotationDigraph| -> BTreeSet<(Rotation, Rotation)> {
                g.untyped_edges()
                    .into_iter()
                    .map(|(a, b)| (g.rotations()[a].clone(), g.rotations()[b].clone()))
                    .collect()
            };
            let lo_set: BTreeSet<_> = lo.rotations().iter().cloned().collect();
            let hi_set: BTreeSet<_> = hi.rotations().iter().cloned().collect();
            assert_eq!(lo_set, hi_set, "seed {seed}");
            assert_eq!(key(&lo), key(&hi), "seed {seed}");
        }
    }

    #[test]
    fn discovery_order_is_an_elimination_sequence() {
        for seed in 0..200 {
            let inst = gen_random(6, 1.0, seed).unwrap();
            let a = find_rotation_graph(&inst);
            let mut mu = a.man_optimal.clone();
            for rho in a.graph.rotations() {
                assert!(
                    exposed_rotations(&inst, &mu).unwrap().contains(rho),
                    "seed {seed}"
                );
                mu = eliminate(&mu, rho).unwrap();
            }
            assert_eq!(mu, a.woman_optimal);
        }
    }

    #[test]
    fn edges_point_forward_in_discovery_order() {
        for seed in 0..100 {
            let g = find_rotation_graph(&gen_random(8, 0.7, seed).unwrap()).graph;
            assert!(g.edges().iter().all(|&(a, b, _)| a < b));
        }
    }
}

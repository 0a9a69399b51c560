use std::collections::{BTreeMap, BTreeSet};

use crate::instance::Instance;

use super::{Rotation, RotationError};

/// How the list scan treats type-2 labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelVariant {
    /// Reads every type-2 label on the man's list. Labels past the last
    /// woman he is moved to can name rotations unrelated to his, which adds
    /// spurious edges.
    Buggy,
    /// Stops reading type-2 labels at the woman his last rotation moves him
    /// to.
    Corrected,
}

/// Predecessor edges `(from, to)` computed from a known list of rotations
/// by labelling the men's lists and scanning each one.
///
/// For each pair `(w_i, m_i)` of a rotation, `w_i` on `m_i`'s list gets a
/// type-1 label, and `w_i` on the list of every man strictly between `m_i`
/// and `m_{i-1}` on her list gets a type-2 label. A scan of a man's list
/// keeps the most recent type-1 label seen: a new type-1 label follows it,
/// and a type-2 label precedes it.
pub fn gi_predecessor_edges(
    inst: &Instance,
    rotations: &[Rotation],
    variant: LabelVariant,
) -> Result<BTreeSet<(usize, usize)>, RotationError> {
    let mut type1: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); inst.num_men()];
    let mut type2: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); inst.num_men()];
    let inconsistent = |msg: String| RotationError::Inconsistent(msg);

    for (id, rho) in rotations.iter().enumerate() {
        for (w, from, to) in rho.woman_moves() {
            if w >= inst.num_women() || from >= inst.num_men() {
                return Err(inconsistent(format!("{rho} is out of range")));
            }
            let pos = inst
                .man_rank(from, w)
                .ok_or_else(|| inconsistent(format!("m{} does not list w{}", from + 1, w + 1)))?;
            if type1[from].insert(pos, id).is_some() {
                return Err(inconsistent(format!(
                    "pair (w{},m{}) is in two rotations",
                    w + 1,
                    from + 1
                )));
            }
            let hi = inst.woman_rank(w, from);
            let lo = inst.woman_rank(w, to);
            let (Some(lo), Some(hi)) = (lo, hi) else {
                return Err(inconsistent(format!(
                    "w{} does not list both partners in {rho}",
                    w + 1
                )));
            };
            if lo >= hi {
                return Err(inconsistent(format!("{rho} moves w{} down", w + 1)));
            }
            for &m in &inst.woman_list(w)[lo + 1..hi] {
                if let Some(p) = inst.man_rank(m, w) {
                    type2[m].insert(p, id);
                }
            }
        }
    }

    let mut edges = BTreeSet::new();
    for m in 0..inst.num_men() {
        let end = match variant {
            LabelVariant::Buggy => None,
            LabelVariant::Corrected => match type1[m].iter().next_back() {
                Some((_, &last)) => {
                    let target = rotations[last]
                        .man_moves()
                        .find(|&(man, _, _)| man == m)
                        .map(|(_, _, to)| to)
                        .expect("labelled man is in the rotation");
                    inst.man_rank(m, target)
                }
                None => None,
            },
        };
        let mut current: Option<usize> = None;
        for pos in 0..inst.man_list(m).len() {
            if let Some(&rho) = type1[m].get(&pos) {
                if let Some(c) = current {
                    edges.insert((c, rho));
                }
                current = Some(rho);
            }
            if let Some(&rho) = type2[m].get(&pos) {
                if end.is_some_and(|e| pos > e) {
                    continue;
                }
                if let Some(c) = current {
                    edges.insert((rho, c));
                }
            }
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rotations::find_rotation_graph;

    fn named(
        g: &crate::rotations::RotationDigraph,
        edges: &BTreeSet<(usize, usize)>,
    ) -> BTreeSet<(String, String)> {
        edges
            .iter()
            .map(|&(a, b)| (g.rotations()[a].label(), g.rotations()[b].label()))
            .collect()
    }

    #[test]
    fn poset6_buggy_scan_reads_a_label_past_the_last_move() {
        // m1 is moved only from w1 to w2, yet w4 further down his list
        // carries a type-2 label for the w3-w4-w5 rotation.
        let inst = fixtures::poset6();
        let g = find_rotation_graph(&inst).graph;
        let fixed = gi_predecessor_edges(&inst, g.rotations(), LabelVariant::Corrected).unwrap();
        assert_eq!(fixed, g.untyped_edges());
        let buggy = gi_predecessor_edges(&inst, g.rotations(), LabelVariant::Buggy).unwrap();
        let extra: BTreeSet<_> = buggy.difference(&fixed).copied().collect();
        let expected: BTreeSet<_> = [("w3m3→w4m4→w5m5".to_string(), "w1m1→w2m2".to_string())]
            .into_iter()
            .collect();
        assert_eq!(named(&g, &extra), expected);
    }

    #[test]
    fn buggy_scan_adds_an_edge_between_independent_rotations() {
        let inst = fixtures::tricky5();
        let g = find_rotation_graph(&inst).graph;
        let buggy = gi_predecessor_edges(&inst, g.rotations(), LabelVariant::Buggy).unwrap();
        let fixed = gi_predecessor_edges(&inst, g.rotations(), LabelVariant::Corrected).unwrap();
        assert_eq!(fixed, g.untyped_edges());
        let extra: BTreeSet<_> = buggy.difference(&fixed).copied().collect();
        let names = named(&g, &extra);
        let expected: BTreeSet<_> = [("w3m3→w5m5→w4m4".to_string(), "w1m1→w2m2".to_string())]
            .into_iter()
            .collect();
        assert_eq!(names, expected);
    }

    #[test]
    fn rejects_rotations_that_do_not_fit() {
        let inst = fixtures::poset6();
        let backwards = Rotation::new(vec![(0, 1), (1, 0)]).unwrap();
        assert!(matches!(
            gi_predecessor_edges(&inst, &[backwards], LabelVariant::Corrected),
            Err(RotationError::Inconsistent(_))
        ));
    }
}

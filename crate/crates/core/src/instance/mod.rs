//! Preference instances: two sides of agents with strict, possibly partial
//! preference lists over the other side.
//!
//! Indices are 0-based in memory and 1-based in every file format.

mod generate;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{gen_exponential, gen_random, GenerateError};
pub use parse::{parse_instance, ParseError, ParseErrorKind, Parsed};

/// Which side of the market an agent belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Man,
    Woman,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Man => Side::Woman,
            Side::Woman => Side::Man,
        }
    }

    fn prefix(self) -> char {
        match self {
            Side::Man => 'm',
            Side::Woman => 'w',
        }
    }
}

/// An agent on one side of the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentId {
    pub side: Side,
    pub index: usize,
}

impl AgentId {
    pub fn man(index: usize) -> Self {
        AgentId {
            side: Side::Man,
            index,
        }
    }

    pub fn woman(index: usize) -> Self {
        AgentId {
            side: Side::Woman,
            index,
        }
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.side.prefix(), self.index + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("{agent} lists {partner}, which is out of range")]
    OutOfRange { agent: AgentId, partner: usize },
    #[error("{agent} lists {partner} more than once")]
    Duplicate { agent: AgentId, partner: AgentId },
}

/// A non-mutual list entry that was dropped during normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Warning {
    /// The agent whose list mentioned `partner`.
    pub listed_by: AgentId,
    /// The agent that was dropped from the list.
    pub partner: AgentId,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lists {} but is not listed back; entry dropped",
            self.listed_by, self.partner
        )
    }
}

const UNRANKED: u32 = u32::MAX;

/// Dense rank lookup for one side: `rank(a, b)` is the position of `b` on
/// `a`'s list, 0 being most preferred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    stride: usize,
    ranks: Vec<u32>,
}

impl RankTable {
    fn build(lists: &[Vec<usize>], stride: usize) -> Self {
        let mut ranks = vec![UNRANKED; lists.len() * stride];
        for (a, list) in lists.iter().enumerate() {
            for (pos, &b) in list.iter().enumerate() {
                ranks[a * stride + b] = pos as u32;
            }
        }
        RankTable { stride, ranks }
    }

    #[inline]
    pub fn rank(&self, agent: usize, partner: usize) -> Option<usize> {
        match self.ranks[agent * self.stride + partner] {
            UNRANKED => None,
            r => Some(r as usize),
        }
    }

    /// True when `agent` strictly prefers `a` to `b`. Unlisted partners and
    /// `None` (being single) rank below every listed partner.
    #[inline]
    pub fn prefers(&self, agent: usize, a: Option<usize>, b: Option<usize>) -> bool {
        let key = |x: Option<usize>| match x {
            Some(p) => self.ranks[agent * self.stride + p],
            None => UNRANKED,
        };
        key(a) < key(b)
    }
}

/// A two-sided preference instance.
///
/// Lists are strict and may be partial. Instances produced by the parser and
/// the generators are mutually acceptable (`w` is on `m`'s list iff `m` is on
/// `w`'s list); truncated instances built by [`crate::da::truncate`] need not
/// be.
#[derive(Clone, PartialEq, Eq)]
pub struct Instance {
    men_prefs: Vec<Vec<usize>>,
    women_prefs: Vec<Vec<usize>>,
    men_rank: RankTable,
    women_rank: RankTable,
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Instance")
            .field("men_prefs", &self.men_prefs)
            .field("women_prefs", &self.women_prefs)
            .finish()
    }
}

impl Instance {
    /// Builds an instance from 0-based lists without touching their content.
    /// Entries need not be mutual.
    pub fn from_lists(
        men_prefs: Vec<Vec<usize>>,
        women_prefs: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        check_lists(Side::Man, &men_prefs, women_prefs.len())?;
        check_lists(Side::Woman, &women_prefs, men_prefs.len())?;
        Ok(Self::assemble(men_prefs, women_prefs))
    }

    /// Builds an instance and drops every entry that is not listed back,
    /// returning one warning per dropped entry.
    pub fn normalized(
        men_prefs: Vec<Vec<usize>>,
        women_prefs: Vec<Vec<usize>>,
    ) -> Result<(Self, Vec<Warning>), InstanceError> {
        let raw = Self::from_lists(men_prefs, women_prefs)?;
        let mut warnings = Vec::new();
        let men_prefs = raw
            .men_prefs
            .iter()
            .enumerate()
            .map(|(m, list)| {
                list.iter()
                    .copied()
                    .filter(|&w| {
                        let keep = raw.women_rank.rank(w, m).is_some();
                        if !keep {
                            warnings.push(Warning {
                                listed_by: AgentId::man(m),
                                partner: AgentId::woman(w),
                            });
                        }
                        keep
                    })
                    .collect()
            })
            .collect();
        let women_prefs = raw
            .women_prefs
            .iter()
            .enumerate()
            .map(|(w, list)| {
                list.iter()
                    .copied()
                    .filter(|&m| {
                        let keep = raw.men_rank.rank(m, w).is_some();
                        if !keep {
                            warnings.push(Warning {
                                listed_by: AgentId::woman(w),
                                partner: AgentId::man(m),
                            });
                        }
                        keep
                    })
                    .collect()
            })
            .collect();
        Ok((Self::assemble(men_prefs, women_prefs), warnings))
    }

    fn assemble(men_prefs: Vec<Vec<usize>>, women_prefs: Vec<Vec<usize>>) -> Self {
        let men_rank = RankTable::build(&men_prefs, women_prefs.len());
        let women_rank = RankTable::build(&women_prefs, men_prefs.len());
        Instance {
            men_prefs,
            women_prefs,
            men_rank,
            women_rank,
        }
    }

    pub fn num_men(&self) -> usize {
        self.men_prefs.len()
    }

    pub fn num_women(&self) -> usize {
        self.women_prefs.len()
    }

    /// Number of agents on the larger side.
    pub fn size(&self) -> usize {
        self.num_men().max(self.num_women())
    }

    pub fn men_prefs(&self) -> &[Vec<usize>] {
        &self.men_prefs
    }

    pub fn women_prefs(&self) -> &[Vec<usize>] {
        &self.women_prefs
    }

    pub fn man_list(&self, m: usize) -> &[usize] {
        &self.men_prefs[m]
    }

    pub fn woman_list(&self, w: usize) -> &[usize] {
        &self.women_prefs[w]
    }

    pub fn men_rank(&self) -> &RankTable {
        &self.men_rank
    }

    pub fn women_rank(&self) -> &RankTable {
        &self.women_rank
    }

    /// Position of `w` on `m`'s list.
    #[inline]
    pub fn man_rank(&self, m: usize, w: usize) -> Option<usize> {
        self.men_rank.rank(m, w)
    }

    /// Position of `m` on `w`'s list.
    #[inline]
    pub fn woman_rank(&self, w: usize, m: usize) -> Option<usize> {
        self.women_rank.rank(w, m)
    }

    /// `m` strictly prefers `a` to `b` (`None` = single).
    #[inline]
    pub fn man_prefers(&self, m: usize, a: Option<usize>, b: Option<usize>) -> bool {
        self.men_rank.prefers(m, a, b)
    }

    /// `w` strictly prefers `a` to `b` (`None` = single).
    #[inline]
    pub fn woman_prefers(&self, w: usize, a: Option<usize>, b: Option<usize>) -> bool {
        self.women_rank.prefers(w, a, b)
    }

    /// Both agents list each other.
    #[inline]
    pub fn acceptable(&self, m: usize, w: usize) -> bool {
        self.man_rank(m, w).is_some() && self.woman_rank(w, m).is_some()
    }

    pub fn is_mutual(&self) -> bool {
        self.men_prefs
            .iter()
            .enumerate()
            .all(|(m, list)| list.iter().all(|&w| self.woman_rank(w, m).is_some()))
            && self
                .women_prefs
                .iter()
                .enumerate()
                .all(|(w, list)| list.iter().all(|&m| self.man_rank(m, w).is_some()))
    }

    /// Mutually acceptable pairs as `(man, woman)`, ordered by man then by
    /// his preference.
    pub fn acceptable_pairs(&self) -> Vec<(usize, usize)> {
        self.men_prefs
            .iter()
            .enumerate()
            .flat_map(|(m, list)| {
                list.iter()
                    .filter(move |&&w| self.woman_rank(w, m).is_some())
                    .map(move |&w| (m, w))
            })
            .collect()
    }

    /// Exchanges the roles of men and women.
    pub fn swap_roles(&self) -> Instance {
        Instance {
            men_prefs: self.women_prefs.clone(),
            women_prefs: self.men_prefs.clone(),
            men_rank: self.women_rank.clone(),
            women_rank: self.men_rank.clone(),
        }
    }

    /// Renders the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("men: {}\nwomen: {}\n", self.num_men(), self.num_women());
        write_lists(&mut out, 'm', &self.men_prefs);
        write_lists(&mut out, 'w', &self.women_prefs);
        out
    }

    pub fn to_json(&self) -> String {
        let doc = InstanceJson {
            men: self.num_men(),
            women: self.num_women(),
            men_prefs: one_based(&self.men_prefs),
            women_prefs: one_based(&self.women_prefs),
        };
        serde_json::to_string_pretty(&doc).expect("instance serializes")
    }

    /// Reads the JSON export back; lists are normalized as for text input.
    pub fn from_json(text: &str) -> Result<(Instance, Vec<Warning>), JsonInstanceError> {
        let doc: InstanceJson = serde_json::from_str(text)?;
        if doc.men_prefs.len() != doc.men || doc.women_prefs.len() != doc.women {
            return Err(JsonInstanceError::CountMismatch);
        }
        let men = zero_based(Side::Man, doc.men_prefs, doc.women)?;
        let women = zero_based(Side::Woman, doc.women_prefs, doc.men)?;
        Ok(Instance::normalized(men, women)?)
    }
}

#[derive(Debug, Error)]
pub enum JsonInstanceError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("preference array lengths disagree with the declared counts")]
    CountMismatch,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    men: usize,
    women: usize,
    men_prefs: Vec<Vec<usize>>,
    women_prefs: Vec<Vec<usize>>,
}

fn one_based(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    lists
        .iter()
        .map(|l| l.iter().map(|&x| x + 1).collect())
        .collect()
}

fn zero_based(
    side: Side,
    lists: Vec<Vec<usize>>,
    bound: usize,
) -> Result<Vec<Vec<usize>>, InstanceError> {
    lists
        .into_iter()
        .enumerate()
        .map(|(a, list)| {
            list.into_iter()
                .map(|x| {
                    if x == 0 || x > bound {
                        Err(InstanceError::OutOfRange {
                            agent: AgentId { side, index: a },
                            partner: x,
                        })
                    } else {
                        Ok(x - 1)
                    }
                })
                .collect()
        })
        .collect()
}

fn write_lists(out: &mut String, prefix: char, lists: &[Vec<usize>]) {
    use std::fmt::Write;
    for (a, list) in lists.iter().enumerate() {
        let _ = write!(out, "{}{}:", prefix, a + 1);
        for &b in list {
            let _ = write!(out, " {}", b + 1);
        }
        out.push('\n');
    }
}

fn check_lists(side: Side, lists: &[Vec<usize>], bound: usize) -> Result<(), InstanceError> {
    let mut seen = vec![usize::MAX; bound];
    for (a, list) in lists.iter().enumerate() {
        let agent = AgentId { side, index: a };
        for &b in list {
            if b >= bound {
                return Err(InstanceError::OutOfRange { agent, partner: b });
            }
            if seen[b] == a {
                return Err(InstanceError::Duplicate {
                    agent,
                    partner: AgentId {
                        side: side.other(),
                        index: b,
                    },
                });
            }
            seen[b] = a;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_are_positions() {
        let inst =
            Instance::from_lists(vec![vec![1, 0], vec![0]], vec![vec![0, 1], vec![]]).unwrap();
        assert_eq!(inst.man_rank(0, 1), Some(0));
        assert_eq!(inst.man_rank(0, 0), Some(1));
        assert_eq!(inst.man_rank(1, 1), None);
        assert!(inst.man_prefers(0, Some(1), Some(0)));
        assert!(inst.man_prefers(1, Some(0), None));
        assert!(!inst.man_prefers(1, None, Some(0)));
        assert!(!inst.is_mutual());
    }

    #[test]
    fn duplicate_entries_rejected() {
        let err = Instance::from_lists(vec![vec![0, 0]], vec![vec![0]]).unwrap_err();
        assert!(matches!(err, InstanceError::Duplicate { .. }));
    }

    #[test]
    fn normalization_drops_one_sided_entries() {
        let (inst, warnings) =
            Instance::normalized(vec![vec![0, 1], vec![1]], vec![vec![], vec![0, 1]]).unwrap();
        assert_eq!(inst.men_prefs(), &[vec![1], vec![1]]);
        assert_eq!(inst.women_prefs(), &[vec![], vec![0, 1]]);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].listed_by, AgentId::man(0));
        assert_eq!(warnings[0].partner, AgentId::woman(0));
        assert!(inst.is_mutual());
    }

    #[test]
    fn swap_is_an_involution() {
        let inst = crate::fixtures::poset6();
        let swapped = inst.swap_roles();
        assert_eq!(swapped.men_prefs(), inst.women_prefs());
        assert_eq!(swapped.women_prefs(), inst.men_prefs());
        assert_eq!(swapped.swap_roles(), inst);

        let one = Instance::from_lists(vec![vec![0]], vec![vec![0]]).unwrap();
        assert_eq!(one.swap_roles(), one);
    }

    #[test]
    fn json_round_trip() {
        let inst = crate::fixtures::tricky5();
        let (back, warnings) = Instance::from_json(&inst.to_json()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(back, inst);
    }
}

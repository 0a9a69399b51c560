use std::fmt;

use thiserror::Error;

use crate::instance::{AgentId, Instance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("{0} is out of range")]
    OutOfRange(AgentId),
    #[error("{0} is matched more than once")]
    MatchedTwice(AgentId),
    #[error("{man} and {woman} are matched but not mutually acceptable")]
    Unacceptable { man: AgentId, woman: AgentId },
    #[error("matching has {men} men and {women} women, instance has {inst_men} and {inst_women}")]
    SizeMismatch {
        men: usize,
        women: usize,
        inst_men: usize,
        inst_women: usize,
    },
}

/// A partial one-to-one pairing of men and women.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    man_to_woman: Vec<Option<usize>>,
    woman_to_man: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(num_men: usize, num_women: usize) -> Self {
        Matching {
            man_to_woman: vec![None; num_men],
            woman_to_man: vec![None; num_women],
        }
    }

    pub fn empty_for(inst: &Instance) -> Self {
        Self::empty(inst.num_men(), inst.num_women())
    }

    /// Builds a matching from `(man, woman)` pairs.
    pub fn from_pairs(
        num_men: usize,
        num_women: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, MatchingError> {
        let mut mu = Self::empty(num_men, num_women);
        for (m, w) in pairs {
            if m >= num_men {
                return Err(MatchingError::OutOfRange(AgentId::man(m)));
            }
            if w >= num_women {
                return Err(MatchingError::OutOfRange(AgentId::woman(w)));
            }
            if mu.man_to_woman[m].is_some() {
                return Err(MatchingError::MatchedTwice(AgentId::man(m)));
            }
            if mu.woman_to_man[w].is_some() {
                return Err(MatchingError::MatchedTwice(AgentId::woman(w)));
            }
            mu.man_to_woman[m] = Some(w);
            mu.woman_to_man[w] = Some(m);
        }
        Ok(mu)
    }

    /// Builds a matching from each man's partner.
    pub fn from_man_partners(
        num_women: usize,
        partners: &[Option<usize>],
    ) -> Result<Self, MatchingError> {
        Self::from_pairs(
            partners.len(),
            num_women,
            partners
                .iter()
                .enumerate()
                .filter_map(|(m, w)| w.map(|w| (m, w))),
        )
    }

    /// Builds a matching from each woman's partner.
    pub fn from_woman_partners(
        num_men: usize,
        partners: &[Option<usize>],
    ) -> Result<Self, MatchingError> {
        Self::from_pairs(
            num_men,
            partners.len(),
            partners
                .iter()
                .enumerate()
                .filter_map(|(w, m)| m.map(|m| (m, w))),
        )
    }

    pub fn num_men(&self) -> usize {
        self.man_to_woman.len()
    }

    pub fn num_women(&self) -> usize {
        self.woman_to_man.len()
    }

    #[inline]
    pub fn wife(&self, m: usize) -> Option<usize> {
        self.man_to_woman[m]
    }

    #[inline]
    pub fn husband(&self, w: usize) -> Option<usize> {
        self.woman_to_man[w]
    }

    pub fn man_partners(&self) -> &[Option<usize>] {
        &self.man_to_woman
    }

    pub fn woman_partners(&self) -> &[Option<usize>] {
        &self.woman_to_man
    }

    /// Matched pairs as `(man, woman)` in man order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.man_to_woman
            .iter()
            .enumerate()
            .filter_map(|(m, w)| w.map(|w| (m, w)))
    }

    pub fn len(&self) -> usize {
        self.man_to_woman.iter().filter(|w| w.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs `m` with `w`, unmatching their previous partners.
    pub fn pair(&mut self, m: usize, w: usize) {
        if let Some(old) = self.man_to_woman[m].take() {
            self.woman_to_man[old] = None;
        }
        if let Some(old) = self.woman_to_man[w].take() {
            self.man_to_woman[old] = None;
        }
        self.man_to_woman[m] = Some(w);
        self.woman_to_man[w] = Some(m);
    }

    pub fn unmatch_woman(&mut self, w: usize) -> Option<usize> {
        let m = self.woman_to_man[w].take()?;
        self.man_to_woman[m] = None;
        Some(m)
    }

    /// Agents matched in this matching, men first then women.
    pub fn matched_agents(&self) -> Vec<AgentId> {
        self.man_to_woman
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_some())
            .map(|(m, _)| AgentId::man(m))
            .chain(
                self.woman_to_man
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.is_some())
                    .map(|(w, _)| AgentId::woman(w)),
            )
            .collect()
    }

    /// Checks sizes against `inst` and that every pair is mutually
    /// acceptable there.
    pub fn validate(&self, inst: &Instance) -> Result<(), MatchingError> {
        if self.num_men() != inst.num_men() || self.num_women() != inst.num_women() {
            return Err(MatchingError::SizeMismatch {
                men: self.num_men(),
                women: self.num_women(),
                inst_men: inst.num_men(),
                inst_women: inst.num_women(),
            });
        }
        for (m, w) in self.pairs() {
            if !inst.acceptable(m, w) {
                return Err(MatchingError::Unacceptable {
                    man: AgentId::man(m),
                    woman: AgentId::woman(w),
                });
            }
        }
        Ok(())
    }

    /// Compact form listing each man's partner 1-based, `-` for single,
    /// e.g. `(2,6,4,5,3,1)`.
    pub fn compact(&self) -> String {
        let parts: Vec<String> = self
            .man_to_woman
            .iter()
            .map(|w| w.map_or_else(|| "-".to_string(), |w| (w + 1).to_string()))
            .collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matching{}", self.compact())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.compact())
    }
}

/// Parses the `m<i> -- w<j>` pair format printed by the CLI. Lines starting
/// with `#` or `unmatched` and blank lines are skipped.
pub fn parse_matching(text: &str, inst: &Instance) -> Result<Matching, MatchingParseError> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("unmatched") {
            continue;
        }
        let malformed = || MatchingParseError::Malformed {
            line: line_no,
            text: line.to_string(),
        };
        let (a, b) = line.split_once("--").ok_or_else(malformed)?;
        let m = agent_index(a.trim(), 'm').ok_or_else(malformed)?;
        let w = agent_index(b.trim(), 'w').ok_or_else(malformed)?;
        pairs.push((line_no, m, w));
    }
    let mut mu = Matching::empty_for(inst);
    for (line, m, w) in pairs {
        if m >= inst.num_men() {
            return Err(MatchingParseError::Unknown {
                line,
                agent: AgentId::man(m),
            });
        }
        if w >= inst.num_women() {
            return Err(MatchingParseError::Unknown {
                line,
                agent: AgentId::woman(w),
            });
        }
        if mu.wife(m).is_some() {
            return Err(MatchingParseError::Twice {
                line,
                agent: AgentId::man(m),
            });
        }
        if mu.husband(w).is_some() {
            return Err(MatchingParseError::Twice {
                line,
                agent: AgentId::woman(w),
            });
        }
        mu.pair(m, w);
    }
    Ok(mu)
}

fn agent_index(tok: &str, prefix: char) -> Option<usize> {
    let rest = tok.strip_prefix(prefix)?;
    match rest.parse::<usize>() {
        Ok(i) if i >= 1 => Some(i - 1),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingParseError {
    #[error("line {line}: expected `m<i> -- w<j>`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown agent {agent}")]
    Unknown { line: usize, agent: AgentId },
    #[error("line {line}: {agent} is matched more than once")]
    Twice { line: usize, agent: AgentId },
}

/// Renders `m<i> -- w<j>` lines followed by the unmatched agents, if any.
pub fn format_matching(mu: &Matching) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for (m, w) in mu.pairs() {
        let _ = writeln!(out, "m{} -- w{}", m + 1, w + 1);
    }
    let single_men: Vec<String> = (0..mu.num_men())
        .filter(|&m| mu.wife(m).is_none())
        .map(|m| format!("m{}", m + 1))
        .collect();
    let single_women: Vec<String> = (0..mu.num_women())
        .filter(|&w| mu.husband(w).is_none())
        .map(|w| format!("w{}", w + 1))
        .collect();
    if !single_men.is_empty() {
        let _ = writeln!(out, "unmatched men: {}", single_men.join(" "));
    }
    if !single_women.is_empty() {
        let _ = writeln!(out, "unmatched women: {}", single_women.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_keeps_maps_inverse() {
        let mut mu = Matching::empty(3, 3);
        mu.pair(0, 1);
        mu.pair(2, 1);
        assert_eq!(mu.wife(0), None);
        assert_eq!(mu.husband(1), Some(2));
        assert_eq!(mu.wife(2), Some(1));
        assert_eq!(mu.unmatch_woman(1), Some(2));
        assert!(mu.is_empty());
    }

    #[test]
    fn from_pairs_rejects_conflicts() {
        assert_eq!(
            Matching::from_pairs(2, 2, [(0, 0), (1, 0)]),
            Err(MatchingError::MatchedTwice(AgentId::woman(0)))
        );
        assert_eq!(
            Matching::from_pairs(2, 2, [(0, 2)]),
            Err(MatchingError::OutOfRange(AgentId::woman(2)))
        );
    }

    #[test]
    fn text_round_trip() {
        let inst = crate::fixtures::poset6();
        let mu = Matching::from_man_partners(6, &[Some(1), Some(0), None, Some(4), Some(2), None])
            .unwrap();
        let text = format_matching(&mu);
        assert!(text.contains("unmatched men: m3 m6"));
        assert!(text.contains("unmatched women: w4 w6"));
        assert_eq!(parse_matching(&text, &inst).unwrap(), mu);
        assert_eq!(mu.compact(), "(2,1,-,5,3,-)");
    }

    #[test]
    fn parse_errors() {
        let inst = crate::fixtures::poset6();
        assert!(matches!(
            parse_matching("m7 -- w1", &inst),
            Err(MatchingParseError::Unknown { line: 1, .. })
        ));
        assert!(matches!(
            parse_matching("m1 -- w1\nm1 -- w2", &inst),
            Err(MatchingParseError::Twice { line: 2, .. })
        ));
        assert!(matches!(
            parse_matching("m1 w1", &inst),
            Err(MatchingParseError::Malformed { .. })
        ));
    }
}

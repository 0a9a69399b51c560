//! Men-proposing deferred acceptance, preference truncation, and the
//! rejection chains that start when one woman divorces her partner.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{AgentId, Instance};
use crate::matching::{Matching, MatchingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DaError {
    #[error("{0} is not matched in the reference matching")]
    WomanUnmatched(AgentId),
    #[error("{0} is out of range")]
    OutOfRange(AgentId),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Event counters. Every event is constant work, so the total bounds the
/// running time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionStats {
    pub proposals: u64,
    pub rejections: u64,
    pub rotation_events: u64,
    pub predecessor_edge_events: u64,
}

impl ExecutionStats {
    pub fn total(&self) -> u64 {
        self.proposals + self.rejections + self.rotation_events + self.predecessor_edge_events
    }
}

/// Order in which free men are taken from the queue. The outcome does not
/// depend on it; `Lifo` exists to check exactly that.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FreeManOrder {
    #[default]
    Fifo,
    Lifo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaResult {
    pub matching: Matching,
    /// For each man, the women who rejected him, in his preference order.
    pub rejections: Vec<Vec<usize>>,
    pub stats: ExecutionStats,
}

pub fn mpda(inst: &Instance) -> DaResult {
    mpda_with_order(inst, FreeManOrder::Fifo)
}

/// Men-proposing deferred acceptance. Women reject proposals from men they
/// do not list, so non-mutual (truncated) instances are handled directly.
pub fn mpda_with_order(inst: &Instance, order: FreeManOrder) -> DaResult {
    let n_men = inst.num_men();
    let mut mu = Matching::empty_for(inst);
    let mut next = vec![0usize; n_men];
    let mut stats = ExecutionStats::default();
    let mut free: VecDeque<usize> = (0..n_men).collect();

    loop {
        let m = match order {
            FreeManOrder::Fifo => free.pop_front(),
            FreeManOrder::Lifo => free.pop_back(),
        };
        let Some(m) = m else { break };
        let list = inst.man_list(m);
        while next[m] < list.len() {
            let w = list[next[m]];
            next[m] += 1;
            stats.proposals += 1;
            if inst.woman_rank(w, m).is_some() && inst.woman_prefers(w, Some(m), mu.husband(w)) {
                if let Some(old) = mu.husband(w) {
                    stats.rejections += 1;
                    free.push_back(old);
                }
                mu.pair(m, w);
                break;
            }
            stats.rejections += 1;
        }
    }

    let rejections = (0..n_men)
        .map(|m| {
            let list = inst.man_list(m);
            let upto = mu
                .wife(m)
                .map_or(list.len(), |w| inst.man_rank(m, w).expect("wife is listed"));
            list[..upto].to_vec()
        })
        .collect();
    DaResult {
        matching: mu,
        rejections,
        stats,
    }
}

/// The truncated preferences describing "everyone keeps at least their
/// `mu` partner": matched women drop every man below their partner, matched
/// men drop every woman above theirs, single men lose their whole list and
/// single women keep theirs. With `rejecting = Some(w)`, `w` also drops her
/// partner.
pub fn truncate(
    inst: &Instance,
    mu: &Matching,
    rejecting: Option<usize>,
) -> Result<Instance, DaError> {
    mu.validate(inst)?;
    if let Some(w) = rejecting {
        if w >= inst.num_women() {
            return Err(DaError::OutOfRange(AgentId::woman(w)));
        }
        if mu.husband(w).is_none() {
            return Err(DaError::WomanUnmatched(AgentId::woman(w)));
        }
    }
    let men = (0..inst.num_men())
        .map(|m| match mu.wife(m) {
            Some(w) => {
                let at = inst.man_rank(m, w).expect("validated");
                inst.man_list(m)[at..].to_vec()
            }
            None => Vec::new(),
        })
        .collect();
    let women = (0..inst.num_women())
        .map(|w| match mu.husband(w) {
            Some(m) => {
                let at = inst.woman_rank(w, m).expect("validated");
                let keep = if rejecting == Some(w) { at } else { at + 1 };
                inst.woman_list(w)[..keep].to_vec()
            }
            None => inst.woman_list(w).to_vec(),
        })
        .collect();
    Ok(Instance::from_lists(men, women).expect("sublists of a valid instance"))
}

/// How a rejection chain ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainEnd {
    /// The rejecting woman accepted a new proposal: the outcome is stable.
    ClosedAtStart(usize),
    /// A woman single in the reference matching accepted a proposal.
    AbsorbedBySingleWoman(usize),
    /// The free man ran out of women to propose to.
    ManExhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RejectionChain {
    /// `(woman, man)` links: each woman followed by the man she released.
    /// The first link is the rejecting woman and her reference partner.
    pub entries: Vec<(usize, usize)>,
    pub terminal: ChainEnd,
    /// The matching when the chain stops.
    pub outcome: Matching,
    /// Largest number of good proposals (from men preferred to the
    /// reference partner, accepted or not) received by one matched woman.
    pub good_proposal_max: usize,
    /// A woman attaining `good_proposal_max`, lowest index first.
    pub good_proposal_argmax: Option<usize>,
}

impl RejectionChain {
    pub fn is_closed(&self) -> bool {
        matches!(self.terminal, ChainEnd::ClosedAtStart(_))
    }

    /// Closed with at most one good proposal per woman, i.e. the outcome
    /// covers the reference matching.
    pub fn is_covering(&self) -> bool {
        self.is_closed() && self.good_proposal_max <= 1
    }
}

/// Runs deferred acceptance on `truncate(inst, mu0, Some(w))` warm-started
/// from `mu0`: every other pair is already tentatively matched and only
/// `mu0(w)` is free, so exactly one man is free at any time.
pub fn rejection_chain(
    inst: &Instance,
    mu0: &Matching,
    w: usize,
) -> Result<RejectionChain, DaError> {
    mu0.validate(inst)?;
    if w >= inst.num_women() {
        return Err(DaError::OutOfRange(AgentId::woman(w)));
    }
    let first = mu0
        .husband(w)
        .ok_or(DaError::WomanUnmatched(AgentId::woman(w)))?;

    // Next position on each man's list; matched men have already proposed
    // to their reference partner.
    let mut next: Vec<usize> = (0..inst.num_men())
        .map(|m| {
            mu0.wife(m)
                .map_or(0, |x| inst.man_rank(m, x).expect("validated") + 1)
        })
        .collect();
    let mut mu = mu0.clone();
    mu.unmatch_woman(w);
    let mut good = vec![0usize; inst.num_women()];
    let mut entries = vec![(w, first)];
    let mut free = first;

    let terminal = loop {
        let list = inst.man_list(free);
        if next[free] >= list.len() {
            break ChainEnd::ManExhausted(free);
        }
        let target = list[next[free]];
        next[free] += 1;
        let Some(rank) = inst.woman_rank(target, free) else {
            continue;
        };
        let acceptable = match mu0.husband(target) {
            Some(reference) => {
                let bound = inst.woman_rank(target, reference).expect("validated");
                if rank < bound {
                    good[target] += 1;
                }
                rank < bound || (rank == bound && target != w)
            }
            None => true,
        };
        if !acceptable || !inst.woman_prefers(target, Some(free), mu.husband(target)) {
            continue;
        }
        let displaced = mu.husband(target);
        mu.pair(free, target);
        if target == w {
            break ChainEnd::ClosedAtStart(w);
        }
        if mu0.husband(target).is_none() {
            break ChainEnd::AbsorbedBySingleWoman(target);
        }
        let displaced = displaced.expect("matched women hold a partner");
        entries.push((target, displaced));
        free = displaced;
    };

    let (good_proposal_argmax, good_proposal_max) = good
        .iter()
        .enumerate()
        .filter(|(x, _)| mu0.husband(*x).is_some())
        .fold(
            (None, 0),
            |(arg, best), (x, &c)| {
                if c > best {
                    (Some(x), c)
                } else {
                    (arg, best)
                }
            },
        );
    Ok(RejectionChain {
        entries,
        terminal,
        outcome: mu,
        good_proposal_max,
        good_proposal_argmax,
    })
}

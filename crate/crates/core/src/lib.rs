//! Stable marriage structure: deferred acceptance, the rotations between
//! consecutive stable matchings, their predecessor digraph, and the
//! closed-subset enumeration that lists every stable matching.
//!
//! ```
//! use rotation_poset::{fixtures, find_rotation_graph, poset};
//!
//! let inst = fixtures::poset6();
//! let analysis = find_rotation_graph(&inst);
//! assert_eq!(analysis.graph.len(), 3);
//!
//! let sets = poset::enumerate_closed_sets(&analysis.graph, None).unwrap();
//! assert_eq!(sets.count(), 5);
//! ```

pub mod da;
pub mod fixtures;
pub mod instance;
pub mod lattice;
pub mod matching;
pub mod poset;
pub mod rotations;

#[cfg(test)]
mod testutil;

pub use da::{mpda, rejection_chain, truncate, ChainEnd, DaResult, ExecutionStats, RejectionChain};
pub use instance::{gen_exponential, gen_random, parse_instance, AgentId, Instance, Side};
pub use lattice::{
    dominance, enumerate_stable_bruteforce, is_stable, join, maximal_chains, meet, BlockingPair,
    Dominance, StableLattice,
};
pub use matching::Matching;
pub use poset::ClosedSet;
pub use rotations::{
    eliminate, exposed_rotations, find_rotation_graph, EdgeType, Rotation, RotationAnalysis,
    RotationDigraph,
};

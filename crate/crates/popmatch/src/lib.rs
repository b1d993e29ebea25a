//! Matchings under strict preference lists: stable, popular, dominant, and
//! strongly dominant, with exact rational certificates.
//!
//! The crate is organized around an immutable [`Instance`] (a bipartite or
//! roommates graph where every node ranks its neighbors strictly) and
//! [`Matching`] values on it. On top of those sit:
//!
//! * [`labeling`] - the `(+,+)/(+,-)/(-,-)` edge label system of a matching,
//!   the `{-2,-1,0,2}` weight system on the self-loop-augmented graph, and the
//!   pairwise vote margin `delta`;
//! * [`verify`] - structural popularity/dominance checks with explicit
//!   violating paths, strongly-dominant recognition via 2-SAT, and witness
//!   (dual certificate) verification and search;
//! * [`stable`] - Gale-Shapley, Irving's stable roommates algorithm, and
//!   desk-scale stable matching enumeration;
//! * [`dominant`] - the strongly-dominant algorithm through the bidirected
//!   graph, popular edge sets, and the 1/2-approximation for max-weight
//!   popular matchings;
//! * [`gadgets`] - generators for the 1-in-3 SAT hardness instances and the
//!   constructive maps between satisfying assignments and popular matchings;
//! * [`treewidth`] - minimum-cost popular matching by dynamic programming
//!   over a dichotomic tree decomposition;
//! * [`oracle`] - exhaustive ground-truth computations on small instances.
//!
//! All arithmetic on costs and witnesses is exact (`num::BigRational`); the
//! crate contains no floating point.

pub mod error;
pub mod instance;
pub mod io;
pub mod labeling;
pub mod structure;

mod lp;
mod twosat;

pub mod dominant;
pub mod gadgets;
pub mod oracle;
pub mod stable;
pub mod treewidth;
pub mod verify;

pub use error::Error;
pub use instance::{Instance, InstanceKind, Matching, NodeId, Side};
pub use labeling::{delta, label_edges, weight_system, EdgeLabel, LabeledGraph, WeightSystem};

/// Exact rational scalar used for costs and witness values.
pub type Rat = num::BigRational;

/// Convenience constructor for small rational constants.
pub fn rat(n: i64, d: i64) -> Rat {
    use num::BigInt;
    Rat::new(BigInt::from(n), BigInt::from(d))
}

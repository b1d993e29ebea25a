//! Minimum-cost popular matching on bounded-treewidth instances.
//!
//! The solver runs a dynamic program over a dichotomic (indegree at most 2)
//! rooted tree decomposition. For each bag `B` with successor `S(B)` it keeps
//! one leader (cheapest locally popular matching) per tipping point, where a
//! tipping point bundles the matching induced on `S = B n S(B)` with the set
//! of configurations (endpoint pairs, levels, parities of alternating
//! `S`-paths) at which the matching is active. Internal bags evaluate
//! candidates through small shortcut graphs instead of the full subtree.
//!
//! Costs are perturbed up front so that all matchings have distinct costs;
//! the perturbation preserves the original optimum.

mod config;
mod decomposition;
mod dp;
mod paths;
mod shortcut;

pub use config::{
    enumerate_configurations, is_locally_popular, tipping_point_direct, Configuration,
    DecoratedPair, End, TippingPoint,
};
pub use decomposition::{
    find_tree_decomposition, make_dichotomic, DichotomicDecomposition, TreeDecomposition,
};
pub use dp::{min_cost_popular_tw, min_cost_popular_tw_checked};
pub use paths::{decompose_path, juxtapose, PathSegment, SegmentLabel};
pub use shortcut::build_shortcut_graph;

use num::{BigInt, Integer, One, Signed};

use crate::instance::Instance;
use crate::Rat;

/// Rescales costs to integers and adds `2^i / 2^(|E|+1)` to the i-th edge in
/// canonical order. Distinct subset sums make all matching costs distinct,
/// and since the perturbations sum to less than any positive gap between
/// rescaled costs, a perturbed argmin is an original-cost argmin.
pub fn perturb_costs(inst: &Instance) -> Instance {
    let m = inst.edges().len();
    let mut lcm = BigInt::one();
    for c in inst.costs() {
        lcm = lcm.lcm(c.denom());
    }
    let lcm = Rat::from_integer(lcm.abs());
    let denom = BigInt::one() << (m + 1);
    let costs = inst
        .costs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let eps = Rat::new(BigInt::one() << i, denom.clone());
            c * &lcm + eps
        })
        .collect();
    inst.with_costs(costs)
}

/// True iff no two matchings can share a cost under this cost vector
/// (sufficient check used in tests: all perturbed costs distinct).
pub fn costs_all_distinct(costs: &[Rat]) -> bool {
    let mut sorted: Vec<&Rat> = costs.iter().collect();
    sorted.sort();
    sorted.windows(2).all(|w| w[0] != w[1])
}

//! Edge labels, the weight system, and pairwise vote margins.
//!
//! Fix a matching `M`. Every non-matching edge gets a sign at each endpoint:
//! `+` at `u` if `u` prefers the other endpoint to its assignment under `M`
//! (being unmatched is worse than any neighbor), `-` otherwise. `G_M` is the
//! graph with the `(-,-)` edges deleted. The weight system puts `wt = 2` on
//! `(+,+)` edges, `-2` on `(-,-)` edges, `0` elsewhere and on matched edges,
//! and `0`/`-1` on the self-loop of an unmatched/matched node; the weight of
//! the self-loop completion of any matching `N` equals the vote margin
//! `delta(N, M)`.

use crate::instance::{Instance, Matching, NodeId};

/// Label of an edge relative to a matching. For the signed variants the
/// orientation follows the edge's canonical endpoint order (lexicographically
/// smaller name first).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeLabel {
    PlusPlus,
    PlusMinus,
    MinusPlus,
    MinusMinus,
    Matched,
}

impl EdgeLabel {
    pub fn is_plus_plus(self) -> bool {
        self == EdgeLabel::PlusPlus
    }
}

/// `G_M`: all edges labeled, with `(-,-)` edges excluded from `kept_edges`.
#[derive(Debug, Clone)]
pub struct LabeledGraph {
    /// Label of every instance edge, aligned with the canonical edge order.
    pub labels: Vec<EdgeLabel>,
    /// Exposure flag per node (true iff unmatched).
    pub exposed: Vec<bool>,
}

impl LabeledGraph {
    /// Edges of `G_M` (everything except `(-,-)`), with labels.
    pub fn kept_edges<'a>(
        &'a self,
        inst: &'a Instance,
    ) -> impl Iterator<Item = (NodeId, NodeId, EdgeLabel)> + 'a {
        inst.edges()
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l != EdgeLabel::MinusMinus)
            .map(|(&(u, v), &l)| (u, v, l))
    }

    /// Edges removed from `G_M`.
    pub fn removed_edges<'a>(
        &'a self,
        inst: &'a Instance,
    ) -> impl Iterator<Item = (NodeId, NodeId)> + 'a {
        inst.edges()
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l == EdgeLabel::MinusMinus)
            .map(|(&(u, v), _)| (u, v))
    }
}

/// Sign of edge (u, v) at u: true for `+`.
/// A node prefers any neighbor to being unmatched.
fn plus_at(inst: &Instance, m: &Matching, u: NodeId, v: NodeId) -> bool {
    match m.partner(u) {
        None => true,
        Some(p) => inst.prefers(u, v, p),
    }
}

/// Labels every edge of the instance relative to `m`.
pub fn label_edges(inst: &Instance, m: &Matching) -> LabeledGraph {
    let labels = inst
        .edges()
        .iter()
        .map(|&(u, v)| {
            if m.contains(u, v) {
                EdgeLabel::Matched
            } else {
                match (plus_at(inst, m, u, v), plus_at(inst, m, v, u)) {
                    (true, true) => EdgeLabel::PlusPlus,
                    (true, false) => EdgeLabel::PlusMinus,
                    (false, true) => EdgeLabel::MinusPlus,
                    (false, false) => EdgeLabel::MinusMinus,
                }
            }
        })
        .collect();
    let exposed = (0..inst.len()).map(|u| !m.is_matched(u)).collect();
    LabeledGraph { labels, exposed }
}

/// Edge and self-loop weights relative to a matching.
#[derive(Debug, Clone)]
pub struct WeightSystem {
    /// Per edge, canonical order: 2 for `(+,+)`, -2 for `(-,-)`, else 0.
    pub edge_wt: Vec<i64>,
    /// Per node: 0 if unmatched, -1 if matched.
    pub loop_wt: Vec<i64>,
}

impl WeightSystem {
    pub fn edge(&self, inst: &Instance, u: NodeId, v: NodeId) -> i64 {
        self.edge_wt[inst.edge_index(u, v).expect("weight of non-edge")]
    }

    pub fn self_loop(&self, u: NodeId) -> i64 {
        self.loop_wt[u]
    }

    /// Weight of the perfect matching in the self-loop-augmented graph that
    /// corresponds to `n` (edges of `n` plus self-loops on its exposed nodes).
    pub fn completion_weight(&self, inst: &Instance, n: &Matching) -> i64 {
        let edges: i64 = n.edges().iter().map(|&(u, v)| self.edge(inst, u, v)).sum();
        let loops: i64 = n.exposed_nodes().map(|u| self.self_loop(u)).sum();
        edges + loops
    }
}

/// The weight system `wt_M` for matching `m`.
pub fn weight_system(inst: &Instance, m: &Matching) -> WeightSystem {
    let lg = label_edges(inst, m);
    let edge_wt = lg
        .labels
        .iter()
        .map(|l| match l {
            EdgeLabel::PlusPlus => 2,
            EdgeLabel::MinusMinus => -2,
            _ => 0,
        })
        .collect();
    let loop_wt = (0..inst.len())
        .map(|u| if m.is_matched(u) { -1 } else { 0 })
        .collect();
    WeightSystem { edge_wt, loop_wt }
}

/// Vote margin `phi(m, n) - phi(n, m)`: positive when more nodes prefer `m`.
pub fn delta(inst: &Instance, m: &Matching, n: &Matching) -> i64 {
    let mut margin = 0;
    for u in 0..inst.len() {
        match (m.partner(u), n.partner(u)) {
            (Some(p), Some(q)) => {
                if p != q {
                    margin += if inst.prefers(u, p, q) { 1 } else { -1 };
                }
            }
            (Some(_), None) => margin += 1,
            (None, Some(_)) => margin -= 1,
            (None, None) => {}
        }
    }
    margin
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;

    const D_INSTANCE: &str = "\
popmatch v1 roommates
node d0
node d1
node d2
node d3
pref d0: d1 d2 d3
pref d1: d2 d3 d0
pref d2: d3 d1 d0
pref d3: d1 d2 d0
";

    fn d_setup() -> (Instance, Matching) {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        (inst, m)
    }

    #[test]
    fn d_instance_labels() {
        let (inst, m) = d_setup();
        let lg = label_edges(&inst, &m);
        let plus_plus: Vec<(&str, &str)> = lg
            .kept_edges(&inst)
            .filter(|(_, _, l)| l.is_plus_plus())
            .map(|(u, v, _)| (inst.name(u), inst.name(v)))
            .collect();
        assert_eq!(plus_plus, vec![("d1", "d3")]);
    }

    #[test]
    fn empty_matching_all_plus_plus() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::empty(&inst);
        let lg = label_edges(&inst, &m);
        assert!(lg.labels.iter().all(|l| l.is_plus_plus()));
    }

    #[test]
    fn single_edge_matched() {
        let text = "\
popmatch v1 roommates
node u
node v
pref u: v
pref v: u
";
        let inst = parse_instance(text).unwrap();
        let m = Matching::from_names(&inst, &[("u", "v")]).unwrap();
        let lg = label_edges(&inst, &m);
        assert_eq!(lg.labels, vec![EdgeLabel::Matched]);
        assert!(lg.exposed.iter().all(|&e| !e));
    }

    #[test]
    fn d_instance_weights() {
        let (inst, m) = d_setup();
        let ws = weight_system(&inst, &m);
        let id = |s: &str| inst.node(s).unwrap();
        assert_eq!(ws.edge(&inst, id("d1"), id("d3")), 2);
        assert_eq!(ws.edge(&inst, id("d0"), id("d2")), -2);
        assert_eq!(ws.edge(&inst, id("d0"), id("d1")), 0);
        assert_eq!(ws.self_loop(id("d0")), -1);
        let unmatched = Matching::empty(&inst);
        let ws2 = weight_system(&inst, &unmatched);
        assert_eq!(ws2.self_loop(id("d0")), 0);
    }

    #[test]
    fn d_instance_delta() {
        let (inst, m) = d_setup();
        let n = Matching::from_names(&inst, &[("d0", "d3"), ("d1", "d2")]).unwrap();
        assert_eq!(delta(&inst, &m, &n), 2);
        assert_eq!(delta(&inst, &n, &m), -2);
        assert_eq!(delta(&inst, &m, &m), 0);
    }

    #[test]
    fn delta_equals_completion_weight() {
        let (inst, m) = d_setup();
        let ws = weight_system(&inst, &m);
        let n = Matching::from_names(&inst, &[("d0", "d3"), ("d1", "d2")]).unwrap();
        assert_eq!(delta(&inst, &n, &m), ws.completion_weight(&inst, &n));
    }
}

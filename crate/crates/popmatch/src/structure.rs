//! Alternating-structure searches on a labeled graph view.
//!
//! The three forbidden structures for popularity are searched on a
//! [`LocalView`]: a labeled version of `G_M` (or of an induced subgraph
//! `G_M[X u S]`, or of a synthetic shortcut graph). The view keeps only
//! non-`(-,-)` edges and records, per edge, whether it is matched, a `(+,+)`
//! edge, or an ordinary kept edge. A node matched outside the view is marked
//! `covered`: it is never exposed and an alternating path cannot continue
//! through its (absent) matching edge.
//!
//! Searches are depth-first over simple paths. At a node entered via a
//! non-matching edge the continuation is forced (the node's matching edge),
//! so branching happens at every other step only. Walk-based reachability is
//! deliberately avoided: in non-bipartite graphs an alternating walk does not
//! always contain an alternating simple path of the same shape.

use crate::instance::{Instance, Matching, NodeId};
use crate::labeling::{label_edges, EdgeLabel};

/// Edge classification inside a view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Matched,
    PlusPlus,
    /// Kept `(+,-)`/`(-,+)` edge.
    Other,
}

/// A labeled graph with matching, exposure, and coverage information.
#[derive(Debug, Clone)]
pub struct LocalView {
    pub names: Vec<String>,
    /// Matching partner inside the view.
    pub matched: Vec<Option<usize>>,
    /// True for nodes matched by the underlying matching outside the view.
    pub covered: Vec<bool>,
    /// Adjacency over kept edges only; mirrored in both directions.
    pub adj: Vec<Vec<(usize, EdgeKind)>>,
}

/// A forbidden alternating structure, as a node sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Cycle (closing edge from last back to first node) containing a `(+,+)` edge.
    AlternatingCycleWithPlusPlus(Vec<usize>),
    /// Path whose first and last edges are two distinct `(+,+)` edges.
    PathTwoPlusPlus(Vec<usize>),
    /// Path from an exposed node ending with a `(+,+)` edge.
    PathExposedToPlusPlus(Vec<usize>),
    /// Path between two exposed nodes (relevant to dominance only).
    AugmentingPath(Vec<usize>),
}

impl Violation {
    pub fn nodes(&self) -> &[usize] {
        match self {
            Violation::AlternatingCycleWithPlusPlus(p)
            | Violation::PathTwoPlusPlus(p)
            | Violation::PathExposedToPlusPlus(p)
            | Violation::AugmentingPath(p) => p,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Violation::AlternatingCycleWithPlusPlus(_) => "alternating-cycle-with-plus-plus",
            Violation::PathTwoPlusPlus(_) => "path-two-plus-plus",
            Violation::PathExposedToPlusPlus(_) => "path-exposed-to-plus-plus",
            Violation::AugmentingPath(_) => "augmenting-path",
        }
    }
}

impl LocalView {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn exposed(&self, u: usize) -> bool {
        self.matched[u].is_none() && !self.covered[u]
    }

    /// View of the whole graph `G_M` (no restriction, nothing covered).
    pub fn of_matching(inst: &Instance, m: &Matching) -> LocalView {
        let lg = label_edges(inst, m);
        let mut adj = vec![Vec::new(); inst.len()];
        for (u, v, label) in lg.kept_edges(inst) {
            let kind = match label {
                EdgeLabel::Matched => EdgeKind::Matched,
                EdgeLabel::PlusPlus => EdgeKind::PlusPlus,
                _ => EdgeKind::Other,
            };
            adj[u].push((v, kind));
            adj[v].push((u, kind));
        }
        let matched = (0..inst.len()).map(|u| m.partner(u)).collect();
        LocalView {
            names: inst.names().to_vec(),
            matched,
            covered: vec![false; inst.len()],
            adj,
        }
    }

    /// View of `G_M[keep]` for an `(X u S)`-matching `m`.
    ///
    /// `keep` flags the nodes of `X u S`. Labels at a kept node matched
    /// outside `keep` are computed from its real matched edge; such nodes are
    /// marked covered. Edges with at most one endpoint in `keep` are dropped.
    pub fn restricted(inst: &Instance, m: &Matching, keep: &[bool]) -> LocalView {
        let ids: Vec<NodeId> = (0..inst.len()).filter(|&u| keep[u]).collect();
        let local: Vec<Option<usize>> = {
            let mut map = vec![None; inst.len()];
            for (i, &u) in ids.iter().enumerate() {
                map[u] = Some(i);
            }
            map
        };
        let plus_at = |u: NodeId, v: NodeId| -> bool {
            match m.partner(u) {
                None => true,
                Some(p) => inst.prefers(u, v, p),
            }
        };
        let mut adj = vec![Vec::new(); ids.len()];
        for &(u, v) in inst.edges() {
            let (Some(lu), Some(lv)) = (local[u], local[v]) else {
                continue;
            };
            let kind = if m.contains(u, v) {
                EdgeKind::Matched
            } else {
                match (plus_at(u, v), plus_at(v, u)) {
                    (true, true) => EdgeKind::PlusPlus,
                    (false, false) => continue,
                    _ => EdgeKind::Other,
                }
            };
            adj[lu].push((lv, kind));
            adj[lv].push((lu, kind));
        }
        let mut matched = vec![None; ids.len()];
        let mut covered = vec![false; ids.len()];
        for (i, &u) in ids.iter().enumerate() {
            if let Some(p) = m.partner(u) {
                match local[p] {
                    Some(lp) => matched[i] = Some(lp),
                    None => covered[i] = true,
                }
            }
        }
        LocalView {
            names: ids.iter().map(|&u| inst.name(u).to_string()).collect(),
            matched,
            covered,
            adj,
        }
    }

    fn matching_edge_to(&self, u: usize) -> Option<usize> {
        self.matched[u]
    }

    /// Searches for any of the three popularity-forbidden structures,
    /// in the fixed order cycle / two-plus-plus / exposed-to-plus-plus.
    pub fn find_forbidden_structure(&self) -> Option<Violation> {
        if let Some(v) = self.find_cycle_with_plus_plus() {
            return Some(v);
        }
        if let Some(v) = self.find_two_plus_plus_path() {
            return Some(v);
        }
        self.find_exposed_to_plus_plus()
    }

    /// Structure (i): an alternating cycle containing a `(+,+)` edge.
    ///
    /// The cycle is `x -(+,+)- y -(matched)- ... -(matched)- x`; DFS walks
    /// from `y` keeping alternation, closing when the forced matching edge
    /// returns to `x`.
    fn find_cycle_with_plus_plus(&self) -> Option<Violation> {
        for x in 0..self.len() {
            for &(y, kind) in &self.adj[x] {
                if kind != EdgeKind::PlusPlus {
                    continue;
                }
                let mut on_path = vec![false; self.len()];
                on_path[x] = true;
                let mut path = vec![x, y];
                on_path[y] = true;
                if self.dfs_cycle(x, y, &mut path, &mut on_path) {
                    return Some(Violation::AlternatingCycleWithPlusPlus(path));
                }
            }
        }
        None
    }

    /// Continues an alternating cycle attempt: `cur` was entered via a
    /// non-matching edge, so the next edge is its matching edge.
    fn dfs_cycle(
        &self,
        home: usize,
        cur: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
    ) -> bool {
        let Some(next) = self.matching_edge_to(cur) else {
            return false;
        };
        if next == home {
            return true;
        }
        if on_path[next] {
            return false;
        }
        path.push(next);
        on_path[next] = true;
        // `next` was entered via its matching edge: branch over non-matching edges.
        for &(w, kind) in &self.adj[next] {
            if kind == EdgeKind::Matched || on_path[w] {
                // Closing back to `home` via a non-matching edge would put two
                // non-matching edges at `home`; the cycle must close on a
                // matching edge, handled above.
                continue;
            }
            path.push(w);
            on_path[w] = true;
            if self.dfs_cycle(home, w, path, on_path) {
                return true;
            }
            on_path[w] = false;
            path.pop();
        }
        on_path[next] = false;
        path.pop();
        false
    }

    /// Structure (ii): alternating path whose first and last edges are
    /// distinct `(+,+)` edges.
    fn find_two_plus_plus_path(&self) -> Option<Violation> {
        for x in 0..self.len() {
            for &(y, kind) in &self.adj[x] {
                if kind != EdgeKind::PlusPlus {
                    continue;
                }
                let mut on_path = vec![false; self.len()];
                on_path[x] = true;
                on_path[y] = true;
                let mut path = vec![x, y];
                // The first (+,+) edge cannot be offered again as the closing
                // edge: both its endpoints are already on the path.
                if self.dfs_after_nonmatching(y, &mut path, &mut on_path, &mut |_, _, _, k| {
                    k == EdgeKind::PlusPlus
                }) {
                    return Some(Violation::PathTwoPlusPlus(path));
                }
            }
        }
        None
    }

    /// Structure (iii): alternating path from an exposed node ending with a
    /// `(+,+)` edge.
    fn find_exposed_to_plus_plus(&self) -> Option<Violation> {
        for s in 0..self.len() {
            if !self.exposed(s) {
                continue;
            }
            let mut on_path = vec![false; self.len()];
            on_path[s] = true;
            let mut path = vec![s];
            if self.dfs_after_matching(s, &mut path, &mut on_path, &mut |_, _, _, k| {
                k == EdgeKind::PlusPlus
            }) {
                return Some(Violation::PathExposedToPlusPlus(path));
            }
        }
        None
    }

    /// Augmenting path: alternating path between two distinct exposed nodes.
    pub fn find_augmenting_path(&self) -> Option<Violation> {
        for s in 0..self.len() {
            if !self.exposed(s) {
                continue;
            }
            let mut on_path = vec![false; self.len()];
            on_path[s] = true;
            let mut path = vec![s];
            if self.dfs_after_matching(s, &mut path, &mut on_path, &mut |view, _, w, k| {
                k != EdgeKind::Matched && view.exposed(w)
            }) {
                return Some(Violation::AugmentingPath(path));
            }
        }
        None
    }

    /// `cur` is exposed or was entered via a matching edge: branch over
    /// non-matching edges. `accept(view, from, to, kind)` may close the path
    /// on the edge about to be traversed; otherwise traversal continues with
    /// the forced matching edge at the far endpoint.
    fn dfs_after_matching(
        &self,
        cur: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        accept: &mut impl FnMut(&LocalView, usize, usize, EdgeKind) -> bool,
    ) -> bool {
        for &(w, kind) in &self.adj[cur] {
            if kind == EdgeKind::Matched || on_path[w] {
                continue;
            }
            if accept(self, cur, w, kind) {
                path.push(w);
                return true;
            }
            path.push(w);
            on_path[w] = true;
            if self.dfs_after_nonmatching(w, path, on_path, accept) {
                return true;
            }
            on_path[w] = false;
            path.pop();
        }
        false
    }

    /// `cur` was entered via a non-matching edge: the continuation is its
    /// matching edge (absent for exposed or covered nodes, ending the branch).
    fn dfs_after_nonmatching(
        &self,
        cur: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        accept: &mut impl FnMut(&LocalView, usize, usize, EdgeKind) -> bool,
    ) -> bool {
        let Some(next) = self.matching_edge_to(cur) else {
            return false;
        };
        if on_path[next] {
            return false;
        }
        path.push(next);
        on_path[next] = true;
        if self.dfs_after_matching(next, path, on_path, accept) {
            return true;
        }
        on_path[next] = false;
        path.pop();
        false
    }

    /// Checks that a node sequence really is an alternating structure of the
    /// claimed kind in this view. Used by tests and certificate validation.
    pub fn check_violation(&self, violation: &Violation) -> bool {
        let edge_kind = |u: usize, v: usize| -> Option<EdgeKind> {
            self.adj[u].iter().find(|&&(w, _)| w == v).map(|&(_, k)| k)
        };
        let nodes = violation.nodes();
        let mut distinct = nodes.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != nodes.len() {
            return false;
        }
        let kinds: Option<Vec<EdgeKind>> =
            nodes.windows(2).map(|w| edge_kind(w[0], w[1])).collect();
        let Some(kinds) = kinds else { return false };
        let alternates = |ks: &[EdgeKind]| {
            ks.windows(2)
                .all(|w| (w[0] == EdgeKind::Matched) != (w[1] == EdgeKind::Matched))
        };
        match violation {
            Violation::AlternatingCycleWithPlusPlus(_) => {
                if nodes.len() < 4 || !nodes.len().is_multiple_of(2) {
                    return false;
                }
                let Some(closing) = edge_kind(*nodes.last().unwrap(), nodes[0]) else {
                    return false;
                };
                let mut all = kinds.clone();
                all.push(closing);
                let wrap =
                    (all[0] == EdgeKind::Matched) != (*all.last().unwrap() == EdgeKind::Matched);
                alternates(&all) && wrap && all.contains(&EdgeKind::PlusPlus)
            }
            Violation::PathTwoPlusPlus(_) => {
                kinds.len() >= 3
                    && alternates(&kinds)
                    && kinds.first() == Some(&EdgeKind::PlusPlus)
                    && kinds.last() == Some(&EdgeKind::PlusPlus)
            }
            Violation::PathExposedToPlusPlus(_) => {
                !kinds.is_empty()
                    && alternates(&kinds)
                    && self.exposed(nodes[0])
                    && kinds.first() != Some(&EdgeKind::Matched)
                    && kinds.last() == Some(&EdgeKind::PlusPlus)
            }
            Violation::AugmentingPath(_) => {
                !kinds.is_empty()
                    && alternates(&kinds)
                    && self.exposed(nodes[0])
                    && self.exposed(*nodes.last().unwrap())
                    && kinds.first() != Some(&EdgeKind::Matched)
                    && kinds.last() != Some(&EdgeKind::Matched)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Matching;
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

    #[test]
    fn strongly_dominant_matching_has_no_forbidden_structure() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        let view = LocalView::of_matching(&inst, &m);
        assert_eq!(view.find_forbidden_structure(), None);
        assert_eq!(view.find_augmenting_path(), None);
    }

    #[test]
    fn bad_matching_yields_checked_violation() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d3"), ("d1", "d2")]).unwrap();
        let view = LocalView::of_matching(&inst, &m);
        let violation = view.find_forbidden_structure().expect("unpopular");
        assert!(view.check_violation(&violation));
    }

    #[test]
    fn augmenting_path_found() {
        let text = "\
popmatch v1 bipartite
node a A
node b B
node c A
node d B
pref a: b
pref b: a c
pref c: b d
pref d: c
";
        let inst = parse_instance(text).unwrap();
        let m = Matching::from_names(&inst, &[("b", "c")]).unwrap();
        let view = LocalView::of_matching(&inst, &m);
        let aug = view.find_augmenting_path().expect("a-b-c-d augments");
        assert!(view.check_violation(&aug));
        assert_eq!(aug.nodes().len(), 4);
    }
}

//! Instance and matching data model.
//!
//! An [`Instance`] is a graph (bipartite or roommates) where every node ranks
//! its neighbors in a strict order. The edge set is exactly the set of mutual
//! pairs: `v` appears in `prefs(u)` iff `u` appears in `prefs(v)`. Edges may
//! carry exact rational costs (default 0).
//!
//! Node identifiers are strings. The canonical edge order is lexicographic on
//! the (smaller name, larger name) pair, which makes every derived output
//! deterministic. All types here are immutable after construction.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::Zero;

use crate::error::{Error, Result};
use crate::Rat;

/// Index of a node inside an [`Instance`] (declaration order).
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Bipartite,
    Roommates,
}

/// Side of a node in a bipartite instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// A preference instance: graph plus strict per-node rankings and edge costs.
#[derive(Debug, Clone)]
pub struct Instance {
    kind: InstanceKind,
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    sides: Vec<Option<Side>>,
    /// Neighbor lists, most preferred first.
    prefs: Vec<Vec<NodeId>>,
    /// rank[u][v] = position of v in u's list, usize::MAX if not a neighbor.
    rank: Vec<Vec<usize>>,
    /// Canonical edge list: each edge stored with the lexicographically
    /// smaller name first, list sorted by (name, name).
    edges: Vec<(NodeId, NodeId)>,
    edge_pos: HashMap<(NodeId, NodeId), usize>,
    costs: Vec<Rat>,
}

impl Instance {
    /// Builds an instance from raw parts, validating every invariant.
    ///
    /// `nodes` come in declaration order; a side is mandatory iff the kind is
    /// bipartite. `prefs` maps a node to its strict neighbor ranking. `costs`
    /// may mention each edge at most once and only actual edges.
    pub fn new(
        kind: InstanceKind,
        nodes: Vec<(String, Option<Side>)>,
        prefs: BTreeMap<String, Vec<String>>,
        costs: Vec<((String, String), Rat)>,
    ) -> Result<Instance> {
        let mut names = Vec::with_capacity(nodes.len());
        let mut index = HashMap::new();
        let mut sides = Vec::with_capacity(nodes.len());
        for (name, side) in nodes {
            if index.contains_key(&name) {
                return Err(Error::parse(0, format!("duplicate node id `{name}`")));
            }
            match kind {
                InstanceKind::Bipartite if side.is_none() => {
                    return Err(Error::parse(
                        0,
                        format!("node `{name}` needs a side (A or B)"),
                    ));
                }
                InstanceKind::Roommates if side.is_some() => {
                    return Err(Error::parse(
                        0,
                        format!("node `{name}` must not declare a side"),
                    ));
                }
                _ => {}
            }
            index.insert(name.clone(), names.len());
            names.push(name);
            sides.push(side);
        }

        let n = names.len();
        let mut pref_ids: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (owner, list) in prefs {
            let u = *index
                .get(&owner)
                .ok_or_else(|| Error::parse(0, format!("pref list for unknown node `{owner}`")))?;
            let mut seen = BTreeSet::new();
            for vname in &list {
                let v = *index.get(vname).ok_or_else(|| {
                    Error::parse(0, format!("`{owner}` ranks unknown node `{vname}`"))
                })?;
                if v == u {
                    return Err(Error::parse(0, format!("`{owner}` ranks itself")));
                }
                if !seen.insert(v) {
                    return Err(Error::parse(0, format!("`{owner}` ranks `{vname}` twice")));
                }
                if kind == InstanceKind::Bipartite && sides[u] == sides[v] {
                    return Err(Error::parse(
                        0,
                        format!("edge ({owner},{vname}) joins two nodes of the same side"),
                    ));
                }
                pref_ids[u].push(v);
            }
        }

        // Preference mutuality defines the edge set.
        for u in 0..n {
            for &v in &pref_ids[u] {
                if !pref_ids[v].contains(&u) {
                    return Err(Error::parse(
                        0,
                        format!("`{}` lists `{}` but not vice versa", names[u], names[v]),
                    ));
                }
            }
        }

        let mut rank = vec![vec![usize::MAX; n]; n];
        for u in 0..n {
            for (i, &v) in pref_ids[u].iter().enumerate() {
                rank[u][v] = i;
            }
        }

        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        for u in 0..n {
            for &v in &pref_ids[u] {
                if names[u] < names[v] {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_by(|a, b| (&names[a.0], &names[a.1]).cmp(&(&names[b.0], &names[b.1])));
        let mut edge_pos = HashMap::new();
        for (i, &(u, v)) in edges.iter().enumerate() {
            edge_pos.insert((u.min(v), u.max(v)), i);
        }

        let mut cost_vec = vec![Rat::zero(); edges.len()];
        let mut cost_seen = BTreeSet::new();
        for ((a, b), c) in costs {
            let u = *index
                .get(&a)
                .ok_or_else(|| Error::parse(0, format!("cost on unknown node `{a}`")))?;
            let v = *index
                .get(&b)
                .ok_or_else(|| Error::parse(0, format!("cost on unknown node `{b}`")))?;
            let key = (u.min(v), u.max(v));
            let pos = *edge_pos
                .get(&key)
                .ok_or_else(|| Error::parse(0, format!("cost on non-edge ({a},{b})")))?;
            if !cost_seen.insert(pos) {
                return Err(Error::parse(
                    0,
                    format!("duplicate cost for edge ({a},{b})"),
                ));
            }
            cost_vec[pos] = c;
        }

        Ok(Instance {
            kind,
            names,
            index,
            sides,
            prefs: pref_ids,
            rank,
            edges,
            edge_pos,
            costs: cost_vec,
        })
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn is_bipartite(&self) -> bool {
        self.kind == InstanceKind::Bipartite
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, u: NodeId) -> &str {
        &self.names[u]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn node(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn side(&self, u: NodeId) -> Option<Side> {
        self.sides[u]
    }

    /// Neighbors of `u`, most preferred first.
    pub fn prefs(&self, u: NodeId) -> &[NodeId] {
        &self.prefs[u]
    }

    /// Position of `v` in `u`'s list; `None` if not a neighbor.
    pub fn rank(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let r = self.rank[u][v];
        (r != usize::MAX).then_some(r)
    }

    /// True iff `u` strictly prefers `v` to `w` (both must be neighbors).
    pub fn prefers(&self, u: NodeId, v: NodeId, w: NodeId) -> bool {
        self.rank[u][v] < self.rank[u][w]
    }

    pub fn is_edge(&self, u: NodeId, v: NodeId) -> bool {
        u != v && self.rank[u][v] != usize::MAX
    }

    /// Edges in canonical (lexicographic by name pair) order.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Position of an edge in the canonical order.
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.edge_pos.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn cost(&self, u: NodeId, v: NodeId) -> &Rat {
        &self.costs[self.edge_index(u, v).expect("cost of non-edge")]
    }

    pub fn costs(&self) -> &[Rat] {
        &self.costs
    }

    /// Copy of this instance with the given per-edge costs (canonical order).
    pub fn with_costs(&self, costs: Vec<Rat>) -> Instance {
        assert_eq!(costs.len(), self.edges.len());
        let mut out = self.clone();
        out.costs = costs;
        out
    }

    pub fn matching_cost(&self, m: &Matching) -> Rat {
        let mut total = Rat::zero();
        for &(u, v) in m.edges() {
            total += self.cost(u, v).clone();
        }
        total
    }
}

/// A set of vertex-disjoint edges of an instance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    /// Edges as (lo, hi) index pairs, sorted.
    edges: Vec<(NodeId, NodeId)>,
    partner: Vec<Option<NodeId>>,
}

impl Matching {
    /// Validates that every pair is an edge and no node repeats.
    pub fn new(
        inst: &Instance,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Matching> {
        let mut partner = vec![None; inst.len()];
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if u >= inst.len() || v >= inst.len() || !inst.is_edge(u, v) {
                return Err(Error::InvalidMatching(format!(
                    "({}, {}) is not an edge",
                    inst.names.get(u).map(String::as_str).unwrap_or("?"),
                    inst.names.get(v).map(String::as_str).unwrap_or("?"),
                )));
            }
            if partner[u].is_some() || partner[v].is_some() {
                return Err(Error::InvalidMatching(format!(
                    "node {} or {} matched twice",
                    inst.name(u),
                    inst.name(v)
                )));
            }
            partner[u] = Some(v);
            partner[v] = Some(u);
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        Ok(Matching { edges, partner })
    }

    pub fn empty(inst: &Instance) -> Matching {
        Matching {
            edges: Vec::new(),
            partner: vec![None; inst.len()],
        }
    }

    pub fn from_names(inst: &Instance, pairs: &[(&str, &str)]) -> Result<Matching> {
        let mut resolved = Vec::new();
        for (a, b) in pairs {
            let u = inst
                .node(a)
                .ok_or_else(|| Error::InvalidMatching(format!("unknown node `{a}`")))?;
            let v = inst
                .node(b)
                .ok_or_else(|| Error::InvalidMatching(format!("unknown node `{b}`")))?;
            resolved.push((u, v));
        }
        Matching::new(inst, resolved)
    }

    pub fn partner(&self, u: NodeId) -> Option<NodeId> {
        self.partner[u]
    }

    pub fn is_matched(&self, u: NodeId) -> bool {
        self.partner[u].is_some()
    }

    pub fn contains(&self, u: NodeId, v: NodeId) -> bool {
        self.partner[u] == Some(v)
    }

    /// Edges as sorted (lo, hi) index pairs.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn matched_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(u, p)| p.map(|_| u))
    }

    pub fn exposed_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter_map(|(u, p)| p.is_none().then_some(u))
    }

    /// Edge names in canonical instance order, for display.
    pub fn edge_names<'a>(&self, inst: &'a Instance) -> Vec<(&'a str, &'a str)> {
        let mut named: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (inst.name(u), inst.name(v));
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        named.sort();
        named
    }
}

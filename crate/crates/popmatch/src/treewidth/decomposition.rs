//! Tree decompositions: validation, min-fill construction, exact fallback,
//! and the dichotomic (indegree at most 2) rooted form.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId};

/// A validated tree decomposition of an instance.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    bags: Vec<BTreeSet<NodeId>>,
    tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Validates: tree shape, every node and edge covered, and for each node
    /// the bags containing it form a connected subtree.
    pub fn new(
        bags: Vec<Vec<NodeId>>,
        tree_edges: Vec<(usize, usize)>,
        inst: &Instance,
    ) -> Result<TreeDecomposition> {
        let bags: Vec<BTreeSet<NodeId>> =
            bags.into_iter().map(|b| b.into_iter().collect()).collect();
        let k = bags.len();
        if k == 0 {
            return Err(Error::Precondition(
                "a tree decomposition needs at least one bag".into(),
            ));
        }
        if tree_edges.len() + 1 != k {
            return Err(Error::Precondition(format!(
                "{} bags need {} tree edges, got {}",
                k,
                k - 1,
                tree_edges.len()
            )));
        }
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut Vec<usize>, u: usize) -> usize {
            if p[u] != u {
                let r = find(p, p[u]);
                p[u] = r;
            }
            p[u]
        }
        for &(a, b) in &tree_edges {
            if a >= k || b >= k {
                return Err(Error::Precondition(format!(
                    "tree edge ({a},{b}) out of range"
                )));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::Precondition("tree edges contain a cycle".into()));
            }
            parent[ra] = rb;
        }
        let td = TreeDecomposition { bags, tree_edges };
        td.validate(inst)?;
        Ok(td)
    }

    fn validate(&self, inst: &Instance) -> Result<()> {
        for u in 0..inst.len() {
            if !self.bags.iter().any(|b| b.contains(&u)) {
                return Err(Error::Precondition(format!(
                    "node {} appears in no bag",
                    inst.name(u)
                )));
            }
        }
        for &(u, v) in inst.edges() {
            if !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(Error::Precondition(format!(
                    "edge ({}, {}) appears in no bag",
                    inst.name(u),
                    inst.name(v)
                )));
            }
        }
        // Subtree connectivity per node.
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for u in 0..inst.len() {
            let holders: Vec<usize> = (0..self.bags.len())
                .filter(|&i| self.bags[i].contains(&u))
                .collect();
            let mut reach = vec![false; self.bags.len()];
            let mut stack = vec![holders[0]];
            reach[holders[0]] = true;
            while let Some(i) = stack.pop() {
                for &j in &adj[i] {
                    if !reach[j] && self.bags[j].contains(&u) {
                        reach[j] = true;
                        stack.push(j);
                    }
                }
            }
            if holders.iter().any(|&i| !reach[i]) {
                return Err(Error::Precondition(format!(
                    "bags containing {} do not form a subtree",
                    inst.name(u)
                )));
            }
        }
        Ok(())
    }

    pub fn bags(&self) -> &[BTreeSet<NodeId>] {
        &self.bags
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(|b| b.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }
}

fn adjacency(inst: &Instance) -> Vec<BTreeSet<NodeId>> {
    let mut adj = vec![BTreeSet::new(); inst.len()];
    for &(u, v) in inst.edges() {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    adj
}

/// Builds a decomposition from an elimination order by simulating the
/// eliminations with fill-in.
fn decomposition_from_order(inst: &Instance, order: &[NodeId]) -> Result<TreeDecomposition> {
    let n = inst.len();
    if n == 0 {
        return TreeDecomposition::new(vec![Vec::new()], Vec::new(), inst);
    }
    let mut adj = adjacency(inst);
    let mut position = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut bags: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    let mut removed = vec![false; n];
    for &v in order {
        let nbrs: Vec<NodeId> = adj[v].iter().copied().filter(|&w| !removed[w]).collect();
        let mut bag = nbrs.clone();
        bag.push(v);
        bags.push(bag);
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        }
        removed[v] = true;
    }
    // Bag i attaches to the bag of its earliest-eliminated other member;
    // bags with no later member become component roots, chained at the end.
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let later = bag
            .iter()
            .filter(|&&w| w != order[i])
            .map(|&w| position[w])
            .min();
        match later {
            Some(j) => edges.push((i, j)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, edges, inst)
}

/// Min-fill greedy elimination order.
fn min_fill_order(inst: &Instance) -> Vec<NodeId> {
    let n = inst.len();
    let mut adj = adjacency(inst);
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, NodeId)> = None;
        for v in 0..n {
            if removed[v] {
                continue;
            }
            let nbrs: Vec<NodeId> = adj[v].iter().copied().filter(|&w| !removed[w]).collect();
            let mut fill = 0;
            for i in 0..nbrs.len() {
                for j in i + 1..nbrs.len() {
                    if !adj[nbrs[i]].contains(&nbrs[j]) {
                        fill += 1;
                    }
                }
            }
            if best.map(|(bf, _)| fill < bf).unwrap_or(true) {
                best = Some((fill, v));
            }
        }
        let (_, v) = best.unwrap();
        let nbrs: Vec<NodeId> = adj[v].iter().copied().filter(|&w| !removed[w]).collect();
        for i in 0..nbrs.len() {
            for j in i + 1..nbrs.len() {
                adj[nbrs[i]].insert(nbrs[j]);
                adj[nbrs[j]].insert(nbrs[i]);
            }
        }
        removed[v] = true;
        order.push(v);
    }
    order
}

/// Exact elimination order by subset dynamic programming (n <= 20 or so;
/// used here only up to 12 nodes). Returns an order of optimal width.
fn exact_order(inst: &Instance) -> Vec<NodeId> {
    let n = inst.len();
    assert!(n <= 16);
    let adj = adjacency(inst);
    // reach(S, v): number of nodes outside S u {v} reachable from v through S.
    let degree_through = |s: u32, v: usize| -> usize {
        let mut seen = 0u32;
        let mut stack = vec![v];
        let mut out = 0u32;
        seen |= 1 << v;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if seen >> w & 1 == 1 {
                    continue;
                }
                seen |= 1 << w;
                if s >> w & 1 == 1 {
                    stack.push(w);
                } else {
                    out |= 1 << w;
                }
            }
        }
        out.count_ones() as usize
    };
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut width = vec![u8::MAX; 1usize << n];
    let mut choice = vec![u8::MAX; 1usize << n];
    width[0] = 0;
    for s in 1u32..=full {
        let mut best = u8::MAX;
        let mut best_v = u8::MAX;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let d = degree_through(rest, v) as u8;
            let w = width[rest as usize].max(d);
            if w < best || (w == best && (v as u8) < best_v) {
                best = w;
                best_v = v as u8;
            }
        }
        width[s as usize] = best;
        choice[s as usize] = best_v;
    }
    // Reconstruct: the chosen node of S is eliminated last within S.
    let mut order = vec![0usize; n];
    let mut s = full;
    for i in (0..n).rev() {
        let v = choice[s as usize] as usize;
        order[i] = v;
        s &= !(1 << v);
    }
    order
}

/// Tree decomposition via min-fill; if the width cap is exceeded, an exact
/// elimination order is attempted for instances with at most 12 nodes.
pub fn find_tree_decomposition(inst: &Instance, width_cap: usize) -> Result<TreeDecomposition> {
    let td = decomposition_from_order(inst, &min_fill_order(inst))?;
    if td.width() <= width_cap {
        return Ok(td);
    }
    if inst.len() <= 12 {
        let td = decomposition_from_order(inst, &exact_order(inst))?;
        if td.width() <= width_cap {
            return Ok(td);
        }
    }
    Err(Error::Precondition(format!(
        "width cap {width_cap} unachievable (best found {})",
        td.width()
    )))
}

/// A rooted, oriented tree decomposition in which every bag has at most two
/// predecessors (children).
#[derive(Debug, Clone)]
pub struct DichotomicDecomposition {
    pub bags: Vec<BTreeSet<NodeId>>,
    /// Successor towards the root; `None` exactly at the root.
    pub successor: Vec<Option<usize>>,
    /// Predecessor lists, each of length at most 2.
    pub predecessors: Vec<Vec<usize>>,
    pub root: usize,
}

impl DichotomicDecomposition {
    /// Nodes of the closed subtree headed by `bag`.
    pub fn subtree_nodes(&self, bag: usize) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![bag];
        while let Some(b) = stack.pop() {
            out.extend(self.bags[b].iter().copied());
            stack.extend(self.predecessors[b].iter().copied());
        }
        out
    }

    /// Bags in processing order: every bag after all its predecessors.
    pub fn bottom_up_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.bags.len());
        let mut stack = vec![(self.root, false)];
        while let Some((b, expanded)) = stack.pop() {
            if expanded {
                order.push(b);
            } else {
                stack.push((b, true));
                for &p in self.predecessors[b].iter().rev() {
                    stack.push((p, false));
                }
            }
        }
        order
    }
}

/// Roots the decomposition at bag 0 and splits bags of indegree above 2 by
/// inserting copies, preserving coverage and subtree connectivity.
pub fn make_dichotomic(td: &TreeDecomposition) -> DichotomicDecomposition {
    let k = td.bags().len();
    let mut bags: Vec<BTreeSet<NodeId>> = td.bags().to_vec();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in td.tree_edges() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let root = 0usize;
    let mut successor: Vec<Option<usize>> = vec![None; k];
    let mut visited = vec![false; k];
    let mut stack = vec![root];
    visited[root] = true;
    let mut bfs_order = vec![root];
    while let Some(b) = stack.pop() {
        let mut nbrs = adj[b].clone();
        nbrs.sort_unstable();
        for v in nbrs {
            if !visited[v] {
                visited[v] = true;
                successor[v] = Some(b);
                children[b].push(v);
                stack.push(v);
                bfs_order.push(v);
            }
        }
    }

    // Split any bag with more than two children: a copy takes the first half.
    let mut queue: Vec<usize> = (0..bags.len()).collect();
    while let Some(b) = queue.pop() {
        if children[b].len() <= 2 {
            continue;
        }
        let mut kids = children[b].clone();
        kids.sort_unstable();
        let half = kids.len().div_ceil(2);
        let copy = bags.len();
        bags.push(bags[b].clone());
        successor.push(Some(b));
        children.push(kids[..half].to_vec());
        for &kid in &kids[..half] {
            successor[kid] = Some(copy);
        }
        let mut rest = kids[half..].to_vec();
        rest.push(copy);
        children[b] = rest;
        queue.push(b);
        queue.push(copy);
    }

    for (b, kids) in children.iter().enumerate() {
        debug_assert!(kids.len() <= 2, "bag {b} kept indegree {}", kids.len());
    }
    DichotomicDecomposition {
        bags,
        successor,
        predecessors: children,
        root,
    }
}

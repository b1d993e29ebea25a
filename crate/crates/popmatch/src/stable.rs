//! Classical stable matching algorithms.
//!
//! Gale-Shapley deferred acceptance for bipartite instances (either side may
//! propose), Irving's two-phase algorithm for stable roommates with
//! incomplete lists, and desk-scale enumeration of all stable matchings by
//! break-marriage expansion from the proposer-optimal matching.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, NodeId, Side};
use crate::labeling::label_edges;
use crate::EdgeLabel;

/// Hard cap on enumerated stable matchings; exceeding it is a budget error.
pub const STABLE_ENUM_CAP: usize = 4096;

/// True iff `m` admits no blocking edge (both endpoints strictly better off).
pub fn is_stable(inst: &Instance, m: &Matching) -> bool {
    label_edges(inst, m)
        .labels
        .iter()
        .all(|&l| l != EdgeLabel::PlusPlus)
}

/// Deferred acceptance with `proposing_side` proposing; returns the
/// proposer-optimal stable matching.
pub fn gale_shapley(inst: &Instance, proposing_side: Side) -> Result<Matching> {
    if !inst.is_bipartite() {
        return Err(Error::NotBipartite("gale_shapley"));
    }
    let n = inst.len();
    let mut next: Vec<usize> = vec![0; n];
    let mut held: Vec<Option<NodeId>> = vec![None; n];
    let mut queue: VecDeque<NodeId> = (0..n)
        .filter(|&u| inst.side(u) == Some(proposing_side))
        .collect();

    while let Some(x) = queue.pop_front() {
        while next[x] < inst.prefs(x).len() {
            let y = inst.prefs(x)[next[x]];
            match held[y] {
                None => {
                    held[y] = Some(x);
                    break;
                }
                Some(w) if inst.prefers(y, x, w) => {
                    held[y] = Some(x);
                    next[w] += 1;
                    queue.push_back(w);
                    break;
                }
                Some(_) => next[x] += 1,
            }
        }
    }

    let pairs: Vec<(NodeId, NodeId)> = held
        .iter()
        .enumerate()
        .filter_map(|(y, x)| x.map(|x| (x, y)))
        .collect();
    let m = Matching::new(inst, pairs)?;
    debug_assert!(is_stable(inst, &m));
    Ok(m)
}

/// Working table for Irving's algorithm: per-node reduced preference lists
/// shrunk by symmetric deletions. Pointers only advance and lists only lose
/// entries.
#[derive(Clone)]
struct Table {
    /// lists[u] is u's current list, most preferred first.
    lists: Vec<Vec<NodeId>>,
}

impl Table {
    fn new(inst: &Instance) -> Table {
        Table {
            lists: (0..inst.len()).map(|u| inst.prefs(u).to_vec()).collect(),
        }
    }

    fn delete_pair(&mut self, u: NodeId, v: NodeId) {
        self.lists[u].retain(|&w| w != v);
        self.lists[v].retain(|&w| w != u);
    }

    fn head(&self, u: NodeId) -> Option<NodeId> {
        self.lists[u].first().copied()
    }

    fn rank_in_list(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.lists[u].iter().position(|&w| w == v)
    }
}

/// Irving's stable roommates algorithm, with incomplete lists and the
/// unmatched-is-worst convention. Returns `None` iff no stable matching
/// exists.
pub fn irving(inst: &Instance) -> Option<Matching> {
    let n = inst.len();
    let mut table = Table::new(inst);

    // Phase 1: proposal round. held[y] is the proposer y currently holds.
    let mut held: Vec<Option<NodeId>> = vec![None; n];
    let mut queue: VecDeque<NodeId> = (0..n).collect();
    while let Some(x) = queue.pop_front() {
        if held.contains(&Some(x)) {
            continue;
        }
        loop {
            let Some(y) = table.head(x) else { break };
            match held[y] {
                None => {
                    held[y] = Some(x);
                    break;
                }
                Some(w) if inst.prefers(y, x, w) => {
                    held[y] = Some(x);
                    table.delete_pair(y, w);
                    queue.push_back(w);
                    break;
                }
                Some(_) => {
                    table.delete_pair(x, y);
                }
            }
        }
    }
    // Truncate below held proposals (symmetric deletions).
    for y in 0..n {
        if let Some(x) = held[y] {
            if let Some(pos) = table.rank_in_list(y, x) {
                let tail: Vec<NodeId> = table.lists[y][pos + 1..].to_vec();
                for w in tail {
                    table.delete_pair(y, w);
                }
            }
        }
    }

    // Nodes emptied by phase 1 stay unmatched; phase-1 deletions remove no
    // stable pair. Emptying an *active* list later means no stable matching.
    let active: Vec<bool> = (0..n).map(|u| !table.lists[u].is_empty()).collect();

    // Phase 2: rotation elimination until every list has at most one entry.
    loop {
        let Some(start) = (0..n).find(|&u| table.lists[u].len() >= 2) else {
            break;
        };
        // Walk second/last pointers until a node repeats; in a stable table
        // every node on the walk keeps at least two entries.
        let mut seq: Vec<NodeId> = Vec::new();
        let mut seen = vec![false; n];
        let mut a = start;
        let cycle_start;
        loop {
            if seen[a] {
                cycle_start = seq.iter().position(|&x| x == a).unwrap();
                break;
            }
            seen[a] = true;
            seq.push(a);
            let b = table.lists[a][1];
            a = *table.lists[b].last().unwrap();
            if table.lists[a].len() < 2 {
                // Degenerate table; cross-checked against the oracle in tests.
                return None;
            }
        }
        let cycle = &seq[cycle_start..];
        // Eliminate the rotation: each b_i = second(a_i) rejects everyone it
        // ranks below a_i.
        let pairs: Vec<(NodeId, NodeId)> =
            cycle.iter().map(|&ai| (ai, table.lists[ai][1])).collect();
        for (ai, bi) in pairs {
            let Some(pos) = table.rank_in_list(bi, ai) else {
                return None;
            };
            let tail: Vec<NodeId> = table.lists[bi][pos + 1..].to_vec();
            for w in tail {
                table.delete_pair(bi, w);
            }
        }
        if (0..n).any(|u| active[u] && table.lists[u].is_empty()) {
            return None;
        }
    }

    // Assemble: every nonempty list is a single mutual entry.
    let mut pairs = Vec::new();
    for u in 0..n {
        if let Some(&v) = table.lists[u].first() {
            if table.head(v) != Some(u) {
                return None;
            }
            if u < v {
                pairs.push((u, v));
            }
        }
    }
    let m = Matching::new(inst, pairs).ok()?;
    if is_stable(inst, &m) {
        Some(m)
    } else {
        None
    }
}

/// Break-marriage step: remove the pair `(a0, M(a0))` and cascade proposals
/// with `b0` only accepting proposers it prefers to `a0`. Returns the
/// resulting stable matching when the cascade settles into one.
fn break_marriage(inst: &Instance, m: &Matching, a0: NodeId) -> Option<Matching> {
    let b0 = m.partner(a0)?;
    let n = inst.len();
    let mut partner: Vec<Option<NodeId>> = (0..n).map(|u| m.partner(u)).collect();
    partner[a0] = None;
    partner[b0] = None;
    // Proposal pointers: each proposer resumes after its current partner.
    let mut next: Vec<usize> = vec![0; n];
    for u in 0..n {
        if inst.side(u) == Some(Side::A) {
            next[u] = match partner[u] {
                Some(p) => inst.rank(u, p).unwrap(),
                None => 0,
            };
        }
    }
    next[a0] = inst.rank(a0, b0).unwrap() + 1;

    let mut queue = VecDeque::from([a0]);
    while let Some(x) = queue.pop_front() {
        loop {
            if next[x] >= inst.prefs(x).len() {
                return None;
            }
            let y = inst.prefs(x)[next[x]];
            let accepts = if y == b0 {
                let better_than_a0 = inst.prefers(y, x, a0);
                better_than_a0
                    && match partner[y] {
                        Some(cur) => inst.prefers(y, x, cur),
                        None => true,
                    }
            } else {
                match partner[y] {
                    Some(cur) => inst.prefers(y, x, cur),
                    None => true,
                }
            };
            if accepts {
                if let Some(old) = partner[y] {
                    partner[old] = None;
                    next[old] += 1;
                    queue.push_back(old);
                }
                partner[y] = Some(x);
                partner[x] = Some(y);
                break;
            }
            next[x] += 1;
        }
    }
    partner[b0]?;
    let pairs: Vec<(NodeId, NodeId)> = (0..n)
        .filter_map(|u| partner[u].map(|v| (u.min(v), u.max(v))))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let candidate = Matching::new(inst, pairs).ok()?;
    is_stable(inst, &candidate).then_some(candidate)
}

/// All stable matchings of a bipartite instance, by break-marriage expansion
/// from the A-optimal matching. Deterministic order; errors out beyond
/// [`STABLE_ENUM_CAP`].
pub fn enumerate_stable(inst: &Instance) -> Result<Vec<Matching>> {
    if !inst.is_bipartite() {
        return Err(Error::NotBipartite("enumerate_stable"));
    }
    let root = gale_shapley(inst, Side::A)?;
    let mut seen = std::collections::BTreeSet::new();
    let mut order = Vec::new();
    let mut frontier = vec![root.clone()];
    seen.insert(root.clone());
    order.push(root);
    while let Some(m) = frontier.pop() {
        for a in 0..inst.len() {
            if inst.side(a) != Some(Side::A) || !m.is_matched(a) {
                continue;
            }
            if let Some(next) = break_marriage(inst, &m, a) {
                if seen.insert(next.clone()) {
                    if seen.len() > STABLE_ENUM_CAP {
                        return Err(Error::BudgetExceeded(format!(
                            "more than {STABLE_ENUM_CAP} stable matchings"
                        )));
                    }
                    order.push(next.clone());
                    frontier.push(next);
                }
            }
        }
    }
    order.sort();
    Ok(order)
}

/// Max-cost stable matching; ties broken by canonical edge-set order.
pub fn max_weight_stable(inst: &Instance) -> Result<Matching> {
    let all = enumerate_stable(inst)?;
    let mut best: Option<(crate::Rat, Matching)> = None;
    for m in all {
        let c = inst.matching_cost(&m);
        let better = match &best {
            None => true,
            Some((bc, bm)) => c > *bc || (c == *bc && m < *bm),
        };
        if better {
            best = Some((c, m));
        }
    }
    // Bipartite instances always admit a stable matching (possibly empty).
    Ok(best
        .expect("enumerate_stable returns at least one matching")
        .1)
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

    #[test]
    fn single_pair() {
        let text = "\
popmatch v1 bipartite
node a A
node b B
pref a: b
pref b: a
";
        let inst = parse_instance(text).unwrap();
        let m = gale_shapley(&inst, Side::A).unwrap();
        assert_eq!(m.edge_names(&inst), vec![("a", "b")]);
    }

    #[test]
    fn d_instance_has_no_stable_matching() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        assert!(irving(&inst).is_none());
    }

    #[test]
    fn irving_finds_stable_on_bipartite_run_as_roommates() {
        let text = "\
popmatch v1 roommates
node a1
node a2
node b1
node b2
pref a1: b1 b2
pref a2: b2 b1
pref b1: a1 a2
pref b2: a2 a1
";
        let inst = parse_instance(text).unwrap();
        let m = irving(&inst).expect("stable matching exists");
        assert!(is_stable(&inst, &m));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn two_stable_matchings() {
        let text = "\
popmatch v1 bipartite
node a1 A
node a2 A
node b1 B
node b2 B
pref a1: b1 b2
pref a2: b2 b1
pref b1: a2 a1
pref b2: a1 a2
";
        let inst = parse_instance(text).unwrap();
        let all = enumerate_stable(&inst).unwrap();
        assert_eq!(all.len(), 2);
        for m in &all {
            assert!(is_stable(&inst, m));
            assert_eq!(m.len(), 2);
        }
        let a_opt = gale_shapley(&inst, Side::A).unwrap();
        let b_opt = gale_shapley(&inst, Side::B).unwrap();
        assert!(all.contains(&a_opt));
        assert!(all.contains(&b_opt));
        assert_ne!(a_opt, b_opt);
    }

    #[test]
    fn max_weight_picks_costly_edge() {
        let text = "\
popmatch v1 bipartite
node a1 A
node a2 A
node b1 B
node b2 B
pref a1: b1 b2
pref a2: b2 b1
pref b1: a2 a1
pref b2: a1 a2
cost a1 b1: 5/1
";
        let inst = parse_instance(text).unwrap();
        let m = max_weight_stable(&inst).unwrap();
        let a1 = inst.node("a1").unwrap();
        let b1 = inst.node("b1").unwrap();
        assert!(m.contains(a1, b1));
    }

    #[test]
    fn enumerate_rejects_roommates() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        assert!(matches!(
            enumerate_stable(&inst),
            Err(Error::NotBipartite(_))
        ));
    }
}

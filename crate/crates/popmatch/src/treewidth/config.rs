//! Configurations, tipping points, and local popularity.
//!
//! Fix a separator `S` and a component side `X`. An alternating `S`-path
//! (endpoints in `S` where present, interior in `X`) carries a level
//! `(exposed-node count, (+,+)-edge count)` and a parity per end (0 when the
//! end edge is a matching edge). A configuration is a collection of distinct
//! decorated endpoint pairs, each `S`-node appearing at most twice; a
//! matching is active at a configuration if pairwise `X`-disjoint paths
//! realize all its pairs. The tipping point of a matching is its full set of
//! active configurations (kept as the maximal antichain; activity is closed
//! under dropping pairs) together with its induced `S`-matching.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, NodeId};
use crate::structure::{EdgeKind, LocalView, Violation};
use crate::verify::PopularityCertificate;

/// An endpoint of a certificate path: a separator node or a free end in `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    Node(NodeId),
    Free,
}

/// Endpoint pair with level and parity decorations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DecoratedPair {
    pub ends: (End, End),
    /// (number of exposed nodes on the path, number of (+,+) edges).
    pub level: (u8, u8),
    /// Per end: 0 if the end edge is a matching edge, 1 otherwise.
    pub parity: (u8, u8),
}

/// A set (canonically sorted) of distinct decorated pairs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Configuration {
    pub pairs: Vec<DecoratedPair>,
}

impl Configuration {
    pub fn canonical(mut pairs: Vec<DecoratedPair>) -> Configuration {
        pairs.sort_unstable();
        pairs.dedup();
        Configuration { pairs }
    }

    pub fn is_subset_of(&self, other: &Configuration) -> bool {
        self.pairs
            .iter()
            .all(|p| other.pairs.binary_search(p).is_ok())
    }
}

/// Activity signature of a matching: maximal active configurations plus the
/// induced `S`-matching (edges of the matching touching `S`, as real ids).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TippingPoint {
    pub max_configs: BTreeSet<Configuration>,
    pub s_matching: Vec<(NodeId, NodeId)>,
}

impl TippingPoint {
    pub fn is_active(&self, c: &Configuration) -> bool {
        self.max_configs.iter().any(|d| c.is_subset_of(d))
    }
}

pub(crate) fn maximal_antichain(all: BTreeSet<Configuration>) -> BTreeSet<Configuration> {
    let items: Vec<&Configuration> = all.iter().collect();
    let mut keep = BTreeSet::new();
    'outer: for (i, c) in items.iter().enumerate() {
        for (j, d) in items.iter().enumerate() {
            if i != j && c.is_subset_of(d) && (d.pairs.len() > c.pairs.len()) {
                continue 'outer;
            }
        }
        keep.insert((*c).clone());
    }
    keep
}

/// A labeled view together with separator flags and the map from view nodes
/// back to instance nodes (`None` for synthetic shortcut nodes).
#[derive(Debug, Clone)]
pub struct SeparatorView {
    pub view: LocalView,
    pub in_s: Vec<bool>,
    pub real_id: Vec<Option<NodeId>>,
}

impl SeparatorView {
    /// View of `G_M[X u S]` for a real instance.
    pub fn restricted(inst: &Instance, m: &Matching, s: &[NodeId], x: &[NodeId]) -> SeparatorView {
        let mut keep = vec![false; inst.len()];
        for &u in s.iter().chain(x) {
            keep[u] = true;
        }
        let view = LocalView::restricted(inst, m, &keep);
        let ids: Vec<NodeId> = (0..inst.len()).filter(|&u| keep[u]).collect();
        let s_set: BTreeSet<NodeId> = s.iter().copied().collect();
        let in_s = ids.iter().map(|u| s_set.contains(u)).collect();
        let real_id = ids.into_iter().map(Some).collect();
        SeparatorView {
            view,
            in_s,
            real_id,
        }
    }
}

fn check_separation(inst: &Instance, s: &[NodeId], x: &[NodeId], m: &Matching) -> Result<()> {
    let s_set: BTreeSet<NodeId> = s.iter().copied().collect();
    let x_set: BTreeSet<NodeId> = x.iter().copied().collect();
    if let Some(u) = s_set.intersection(&x_set).next() {
        return Err(Error::Precondition(format!(
            "{} lies in both S and X",
            inst.name(*u)
        )));
    }
    let inside = |u: NodeId| s_set.contains(&u) || x_set.contains(&u);
    for &(u, v) in inst.edges() {
        let xu = x_set.contains(&u);
        let xv = x_set.contains(&v);
        if (xu && !inside(v)) || (xv && !inside(u)) {
            return Err(Error::Precondition(format!(
                "S does not separate X: edge ({}, {}) leaves X",
                inst.name(u),
                inst.name(v)
            )));
        }
    }
    for &(u, v) in m.edges() {
        if !inside(u) && !inside(v) {
            return Err(Error::Precondition(format!(
                "matching edge ({}, {}) is outside X u S",
                inst.name(u),
                inst.name(v)
            )));
        }
    }
    Ok(())
}

/// Local popularity: none of the three forbidden structures appears in
/// `G_M[X u S]`, where exposure means not covered by the matching anywhere.
pub fn is_locally_popular(
    inst: &Instance,
    s: &[NodeId],
    x: &[NodeId],
    m: &Matching,
) -> Result<PopularityCertificate> {
    check_separation(inst, s, x, m)?;
    let sv = SeparatorView::restricted(inst, m, s, x);
    Ok(match sv.view.find_forbidden_structure() {
        None => PopularityCertificate {
            verdict: true,
            violation: None,
        },
        Some(v) => {
            debug_assert!(sv.view.check_violation(&v));
            // Report in instance node ids where possible.
            let nodes = v
                .nodes()
                .iter()
                .map(|&i| sv.real_id[i].unwrap_or(usize::MAX))
                .collect::<Vec<_>>();
            let mapped = match v {
                Violation::AlternatingCycleWithPlusPlus(_) => {
                    Violation::AlternatingCycleWithPlusPlus(nodes)
                }
                Violation::PathTwoPlusPlus(_) => Violation::PathTwoPlusPlus(nodes),
                Violation::PathExposedToPlusPlus(_) => Violation::PathExposedToPlusPlus(nodes),
                Violation::AugmentingPath(_) => Violation::AugmentingPath(nodes),
            };
            PopularityCertificate {
                verdict: false,
                violation: Some(mapped),
            }
        }
    })
}

/// Certificate of one realized pair: the realizing path's edge kinds in the
/// pair's orientation plus the exposure of its two end nodes. Shortcut
/// graphs replay these sequences verbatim, which keeps every path prefix of
/// a shortcut chain a prefix of a real path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PathCert {
    pub kinds: Vec<EdgeKind>,
    pub end_exposed: (bool, bool),
}

impl PathCert {
    pub fn reversed(&self) -> PathCert {
        PathCert {
            kinds: self.kinds.iter().rev().copied().collect(),
            end_exposed: (self.end_exposed.1, self.end_exposed.0),
        }
    }
}

/// Certificates per maximal configuration, aligned with the sorted pairs.
pub type TippingCerts = BTreeMap<Configuration, Vec<PathCert>>;

/// An enumerated alternating `S`-path of a view, reduced to what activity
/// checks need: its decoration, its certificate, and its footprint on the
/// non-separator side.
#[derive(Debug, Clone)]
pub struct SPath {
    /// Bitmask over view-local non-separator nodes used by the path.
    pub x_mask: u128,
    /// Forward decoration (first node to last node).
    pub pair: DecoratedPair,
    pub cert: PathCert,
}

const MAX_PATHS: usize = 200_000;
const MAX_PAIRS: usize = 64;
const MAX_SETS: usize = 2_000_000;

fn path_decoration(
    sv: &SeparatorView,
    nodes: &[usize],
    kinds: &[EdgeKind],
) -> Option<DecoratedPair> {
    let plus: u8 = kinds.iter().filter(|&&k| k == EdgeKind::PlusPlus).count() as u8;
    if plus >= 2 {
        // Level infinity: only possible when the matching is not locally
        // popular; such paths never enter a configuration.
        return None;
    }
    let exposed: u8 = nodes.iter().filter(|&&v| sv.view.exposed(v)).count() as u8;
    let endf = |v: usize| -> End {
        if sv.in_s[v] {
            End::Node(sv.real_id[v].expect("separator nodes are real"))
        } else {
            End::Free
        }
    };
    let par = |k: EdgeKind| u8::from(k != EdgeKind::Matched);
    Some(DecoratedPair {
        ends: (endf(nodes[0]), endf(*nodes.last().unwrap())),
        level: (exposed, plus),
        parity: (par(kinds[0]), par(*kinds.last().unwrap())),
    })
}

fn reverse_pair(p: &DecoratedPair) -> DecoratedPair {
    DecoratedPair {
        ends: (p.ends.1, p.ends.0),
        level: p.level,
        parity: (p.parity.1, p.parity.0),
    }
}

/// Enumerates every alternating `S`-path (at least one edge, interior in the
/// non-separator side) starting at a separator node. Reversals are accounted
/// for when pairs are collected.
pub fn enumerate_s_paths(sv: &SeparatorView) -> Result<Vec<SPath>> {
    let n = sv.view.len();
    if n > 120 {
        return Err(Error::BudgetExceeded(format!(
            "{n} nodes in separator view"
        )));
    }
    let mut out: Vec<SPath> = Vec::new();
    let x_bit = |v: usize| -> u128 {
        if sv.in_s[v] {
            0
        } else {
            1 << v
        }
    };

    struct Dfs<'a> {
        sv: &'a SeparatorView,
        out: Vec<SPath>,
        nodes: Vec<usize>,
        kinds: Vec<EdgeKind>,
        on_path: Vec<bool>,
        mask: u128,
    }
    impl Dfs<'_> {
        fn record(&mut self) -> Result<()> {
            if self.out.len() >= MAX_PATHS {
                return Err(Error::BudgetExceeded("alternating path enumeration".into()));
            }
            if let Some(pair) = path_decoration(self.sv, &self.nodes, &self.kinds) {
                let cert = PathCert {
                    kinds: self.kinds.clone(),
                    end_exposed: (
                        self.sv.view.exposed(self.nodes[0]),
                        self.sv.view.exposed(*self.nodes.last().unwrap()),
                    ),
                };
                self.out.push(SPath {
                    x_mask: self.mask,
                    pair,
                    cert,
                });
            }
            Ok(())
        }

        fn extend(
            &mut self,
            cur: usize,
            came_matched: bool,
            x_bit: &impl Fn(usize) -> u128,
        ) -> Result<()> {
            if came_matched {
                // Next edge must be non-matching.
                let nexts: Vec<(usize, EdgeKind)> = self.sv.view.adj[cur]
                    .iter()
                    .copied()
                    .filter(|&(w, k)| k != EdgeKind::Matched && !self.on_path[w])
                    .collect();
                for (w, k) in nexts {
                    self.step(cur, w, k, x_bit)?;
                }
            } else {
                // Next edge is cur's matching edge, if present in the view.
                if let Some(w) = self.sv.view.matched[cur] {
                    if !self.on_path[w] {
                        self.step(cur, w, EdgeKind::Matched, x_bit)?;
                    }
                }
            }
            Ok(())
        }

        fn step(
            &mut self,
            _cur: usize,
            w: usize,
            k: EdgeKind,
            x_bit: &impl Fn(usize) -> u128,
        ) -> Result<()> {
            self.nodes.push(w);
            self.kinds.push(k);
            self.on_path[w] = true;
            self.mask |= x_bit(w);
            self.record()?;
            // Separator nodes cannot be interior; stop there.
            if !self.sv.in_s[w] {
                self.extend(w, k == EdgeKind::Matched, x_bit)?;
            }
            self.mask &= !x_bit(w);
            self.on_path[w] = false;
            self.kinds.pop();
            self.nodes.pop();
            Ok(())
        }
    }

    for s in 0..n {
        if !sv.in_s[s] {
            continue;
        }
        let mut dfs = Dfs {
            sv,
            out: std::mem::take(&mut out),
            nodes: vec![s],
            kinds: Vec::new(),
            on_path: vec![false; n],
            mask: 0,
        };
        dfs.on_path[s] = true;
        let firsts: Vec<(usize, EdgeKind)> = sv.view.adj[s].to_vec();
        for (w, k) in firsts {
            if !dfs.on_path[w] {
                dfs.step(s, w, k, &x_bit)?;
            }
        }
        out = dfs.out;
    }
    Ok(out)
}

/// Collects the maximal active configurations realizable by `X`-disjoint
/// sub-collections of the given paths, with one witness family of realizing
/// path certificates per configuration.
pub fn active_configurations(paths: &[SPath]) -> Result<TippingCerts> {
    // Realizable decorated pairs with minimal X-masks and their certificates.
    // Both orientations of every path are realizable.
    let mut masks: BTreeMap<DecoratedPair, Vec<(u128, PathCert)>> = BTreeMap::new();
    let mut add = |pair: DecoratedPair, mask: u128, cert: PathCert| {
        let entry = masks.entry(pair).or_default();
        if entry.iter().any(|&(m, _)| m & mask == m) {
            return;
        }
        entry.retain(|&(m, _)| mask & m != mask);
        entry.push((mask, cert));
    };
    for p in paths {
        add(p.pair, p.x_mask, p.cert.clone());
        add(reverse_pair(&p.pair), p.x_mask, p.cert.reversed());
    }
    let pairs: Vec<(DecoratedPair, Vec<(u128, PathCert)>)> = masks.into_iter().collect();
    if pairs.len() > MAX_PAIRS {
        return Err(Error::BudgetExceeded(format!(
            "{} realizable decorated pairs",
            pairs.len()
        )));
    }

    // Node multiplicity bound: each separator node at most twice.
    let pair_nodes = |p: &DecoratedPair| -> Vec<NodeId> {
        let mut v = Vec::new();
        if let End::Node(u) = p.ends.0 {
            v.push(u);
        }
        if let End::Node(u) = p.ends.1 {
            v.push(u);
        }
        v
    };

    // Only saturated selections (no pair addable under the current masks and
    // node counts) are recorded: every active configuration is a subset of
    // one of them, and the antichain filter below needs far fewer candidates
    // than the full downward-closed family.
    struct Search<'a> {
        pairs: &'a [(DecoratedPair, Vec<(u128, PathCert)>)],
        chosen: Vec<(DecoratedPair, PathCert)>,
        counts: BTreeMap<NodeId, u8>,
        found: TippingCerts,
        steps: usize,
    }

    impl Search<'_> {
        fn addable(&self, idx: usize, used_mask: u128, nodes: &[NodeId]) -> Option<u128> {
            if nodes
                .iter()
                .any(|u| self.counts.get(u).copied().unwrap_or(0) >= 2)
            {
                return None;
            }
            self.pairs[idx]
                .1
                .iter()
                .find(|&&(m, _)| m & used_mask == 0)
                .map(|&(m, _)| m)
        }

        fn go(
            &mut self,
            i: usize,
            used_mask: u128,
            pair_nodes: &impl Fn(&DecoratedPair) -> Vec<NodeId>,
        ) -> Result<()> {
            self.steps += 1;
            if self.steps > MAX_SETS {
                return Err(Error::BudgetExceeded(
                    "active configuration enumeration".into(),
                ));
            }
            if i == self.pairs.len() {
                let saturated = (0..self.pairs.len()).all(|j| {
                    self.chosen.iter().any(|(p, _)| *p == self.pairs[j].0)
                        || self
                            .addable(j, used_mask, &pair_nodes(&self.pairs[j].0))
                            .is_none()
                });
                if saturated {
                    let mut entries = self.chosen.clone();
                    entries.sort_by_key(|a| a.0);
                    let config = Configuration {
                        pairs: entries.iter().map(|(p, _)| *p).collect(),
                    };
                    self.found
                        .entry(config)
                        .or_insert_with(|| entries.into_iter().map(|(_, c)| c).collect());
                }
                return Ok(());
            }
            // Skip pair i.
            self.go(i + 1, used_mask, pair_nodes)?;
            // Take pair i with any compatible mask; different minimal masks
            // can admit different extensions, so each is tried.
            let nodes = pair_nodes(&self.pairs[i].0);
            if nodes
                .iter()
                .any(|u| self.counts.get(u).copied().unwrap_or(0) >= 2)
            {
                return Ok(());
            }
            for u in &nodes {
                *self.counts.entry(*u).or_default() += 1;
            }
            let options: Vec<(u128, PathCert)> = self.pairs[i].1.clone();
            for (m, cert) in options {
                if m & used_mask == 0 {
                    self.chosen.push((self.pairs[i].0, cert));
                    self.go(i + 1, used_mask | m, pair_nodes)?;
                    self.chosen.pop();
                }
            }
            for u in &nodes {
                *self.counts.get_mut(u).unwrap() -= 1;
            }
            Ok(())
        }
    }

    let mut search = Search {
        pairs: &pairs,
        chosen: Vec::new(),
        counts: BTreeMap::new(),
        found: TippingCerts::new(),
        steps: 0,
    };
    search.go(0, 0, &pair_nodes)?;
    let mut found = search.found;

    let keys: BTreeSet<Configuration> = found.keys().cloned().collect();
    let maximal = maximal_antichain(keys);
    found.retain(|k, _| maximal.contains(k));
    Ok(found)
}

/// Tipping point by exhaustive search over the restricted graph. Intended for
/// leaf bags and shortcut graphs; guarded by size.
pub fn tipping_point_direct(
    inst: &Instance,
    s: &[NodeId],
    x: &[NodeId],
    m: &Matching,
) -> Result<TippingPoint> {
    check_separation(inst, s, x, m)?;
    if s.len() + x.len() > 16 {
        return Err(Error::BudgetExceeded(format!(
            "direct tipping point on {} nodes",
            s.len() + x.len()
        )));
    }
    let sv = SeparatorView::restricted(inst, m, s, x);
    Ok(tipping_point_of_view(&sv, s_matching_of(inst, m, s))?.0)
}

/// The `S`-matching of `m`: its edges with at least one endpoint in `S`.
pub fn s_matching_of(_inst: &Instance, m: &Matching, s: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let s_set: BTreeSet<NodeId> = s.iter().copied().collect();
    let mut out: Vec<(NodeId, NodeId)> = m
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| s_set.contains(&u) || s_set.contains(&v))
        .collect();
    out.sort_unstable();
    out
}

/// Tipping point of an arbitrary separator view (real or shortcut), together
/// with the certificate paths of each maximal configuration.
pub fn tipping_point_of_view(
    sv: &SeparatorView,
    s_matching: Vec<(NodeId, NodeId)>,
) -> Result<(TippingPoint, TippingCerts)> {
    let paths = enumerate_s_paths(sv)?;
    let certs = active_configurations(&paths)?;
    let max_configs = certs.keys().cloned().collect();
    Ok((
        TippingPoint {
            max_configs,
            s_matching,
        },
        certs,
    ))
}

/// Syntactic enumeration of all configurations over a separator: ordered
/// lists of distinct decorated pairs, each node appearing at most twice.
/// The count explodes factorially in the decoration space (tens of millions
/// already at two separator nodes), so enumeration is capped at one node;
/// the solver itself never enumerates configurations, it only collects
/// active ones from actual paths.
pub fn enumerate_configurations(s: &[NodeId]) -> Result<Vec<Vec<DecoratedPair>>> {
    if s.len() > 1 {
        return Err(Error::BudgetExceeded(format!(
            "configuration enumeration over |S| = {}",
            s.len()
        )));
    }
    let mut ends: Vec<End> = s.iter().map(|&u| End::Node(u)).collect();
    ends.push(End::Free);
    ends.sort_unstable();
    // u_i != v_i rules out equal node ends and the all-free pair.
    let mut base_pairs: Vec<(End, End)> = Vec::new();
    for &a in &ends {
        for &b in &ends {
            if a != b {
                base_pairs.push((a, b));
            }
        }
    }
    let mut decorated: Vec<DecoratedPair> = Vec::new();
    for &(a, b) in &base_pairs {
        for e in 0..=2u8 {
            for p in 0..=1u8 {
                for pf in 0..=1u8 {
                    for pl in 0..=1u8 {
                        decorated.push(DecoratedPair {
                            ends: (a, b),
                            level: (e, p),
                            parity: (pf, pl),
                        });
                    }
                }
            }
        }
    }
    decorated.sort_unstable();

    let mut out: Vec<Vec<DecoratedPair>> = Vec::new();
    let mut current: Vec<DecoratedPair> = Vec::new();
    fn count_uses(list: &[DecoratedPair], u: NodeId) -> usize {
        list.iter()
            .flat_map(|p| [p.ends.0, p.ends.1])
            .filter(|&e| e == End::Node(u))
            .count()
    }
    fn go(
        decorated: &[DecoratedPair],
        s: &[NodeId],
        current: &mut Vec<DecoratedPair>,
        out: &mut Vec<Vec<DecoratedPair>>,
    ) {
        out.push(current.clone());
        for d in decorated {
            // Ordered lists over pairwise distinct end-pairs.
            if current.iter().any(|c| c.ends == d.ends) {
                continue;
            }
            let ok = s.iter().all(|&u| {
                let uses = count_uses(current, u)
                    + usize::from(d.ends.0 == End::Node(u))
                    + usize::from(d.ends.1 == End::Node(u));
                uses <= 2
            });
            if ok {
                current.push(*d);
                go(decorated, s, current, out);
                current.pop();
            }
        }
    }
    go(&decorated, s, &mut current, &mut out);
    Ok(out)
}

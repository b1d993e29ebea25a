//! Popularity and dominance checks with certificates.
//!
//! A matching is popular iff `G_M` contains none of: an alternating cycle
//! with a `(+,+)` edge, an alternating path between two distinct `(+,+)`
//! edges, an alternating path from an exposed node to a `(+,+)` edge. A
//! popular matching is dominant iff `G_M` has no augmenting path. A matching
//! is strongly dominant iff the node set splits into `(L, R)` with the
//! matching inside `L x R`, `R` fully matched, every `(+,+)` edge inside
//! `R x R`, and every `L x L` edge labeled `(-,-)`; recognition is a literal
//! 2-SAT transcription of those four conditions.
//!
//! Witnesses are node vectors `alpha` with zero sum covering every edge
//! (`alpha_u + alpha_v >= wt_M(u,v)`) and every self-loop. A witness proves
//! popularity in any graph; in bipartite graphs one exists iff the matching
//! is popular, and then one always exists with entries in `{0, +1, -1}`.

use std::collections::BTreeSet;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, NodeId};
use crate::labeling::{weight_system, LabeledGraph};
use crate::lp::Feasibility;
use crate::structure::{LocalView, Violation};
use crate::twosat::{neg, pos, TwoSat};
use crate::{label_edges, EdgeLabel, Rat};

/// Outcome of a structural check: either a clean verdict or a concrete
/// violating structure.
#[derive(Debug, Clone)]
pub struct PopularityCertificate {
    pub verdict: bool,
    pub violation: Option<Violation>,
}

impl PopularityCertificate {
    fn ok() -> Self {
        PopularityCertificate {
            verdict: true,
            violation: None,
        }
    }

    fn bad(v: Violation) -> Self {
        PopularityCertificate {
            verdict: false,
            violation: Some(v),
        }
    }

    /// Renders the violation as `violation <kind>: v1 v2 ... vk`.
    pub fn describe(&self, inst: &Instance) -> Option<String> {
        self.violation.as_ref().map(|v| {
            let nodes: Vec<&str> = v.nodes().iter().map(|&u| inst.name(u)).collect();
            format!("violation {}: {}", v.kind_name(), nodes.join(" "))
        })
    }
}

/// Checks popularity through the forbidden-structure characterization.
pub fn is_popular_structural(inst: &Instance, m: &Matching) -> PopularityCertificate {
    let view = LocalView::of_matching(inst, m);
    match view.find_forbidden_structure() {
        None => PopularityCertificate::ok(),
        Some(v) => {
            debug_assert!(view.check_violation(&v));
            PopularityCertificate::bad(v)
        }
    }
}

/// Checks dominance of a popular matching: no augmenting path in `G_M`.
///
/// The equivalence is two-sided in bipartite graphs; for roommates instances
/// "no augmenting path" is necessary for dominance and the converse is
/// cross-checked experimentally against the vote-count oracle.
pub fn is_dominant_structural(inst: &Instance, m: &Matching) -> Result<PopularityCertificate> {
    let pop = is_popular_structural(inst, m);
    if !pop.verdict {
        return Err(Error::Precondition(
            "dominance check requires a popular matching".into(),
        ));
    }
    let view = LocalView::of_matching(inst, m);
    Ok(match view.find_augmenting_path() {
        None => PopularityCertificate::ok(),
        Some(v) => {
            debug_assert!(view.check_violation(&v));
            PopularityCertificate::bad(v)
        }
    })
}

/// Partition certifying strong dominance: `(L, R)` sorted by node name.
pub type Partition = (Vec<NodeId>, Vec<NodeId>);

/// Recognizes strongly dominant matchings via 2-SAT over "u in R" variables.
///
/// Clauses: a `(+,+)` edge forces both endpoints into R; any edge that is not
/// `(-,-)` needs at least one endpoint in R; a matched edge has exactly one
/// endpoint in R; an unmatched node lies in L.
pub fn is_strongly_dominant(inst: &Instance, m: &Matching) -> Option<Partition> {
    let lg = label_edges(inst, m);
    let mut sat = TwoSat::new(inst.len());
    for u in 0..inst.len() {
        if !m.is_matched(u) {
            sat.add_unit(neg(u));
        }
    }
    for (&(u, v), &label) in inst.edges().iter().zip(&lg.labels) {
        match label {
            EdgeLabel::Matched => sat.add_xor(pos(u), pos(v)),
            EdgeLabel::PlusPlus => {
                sat.add_unit(pos(u));
                sat.add_unit(pos(v));
            }
            EdgeLabel::PlusMinus | EdgeLabel::MinusPlus => sat.add_clause(pos(u), pos(v)),
            EdgeLabel::MinusMinus => {}
        }
    }
    let values = sat.solve()?;
    let mut left: Vec<NodeId> = (0..inst.len()).filter(|&u| !values[u]).collect();
    let mut right: Vec<NodeId> = (0..inst.len()).filter(|&u| values[u]).collect();
    left.sort_by(|&a, &b| inst.name(a).cmp(inst.name(b)));
    right.sort_by(|&a, &b| inst.name(a).cmp(inst.name(b)));
    Some((left, right))
}

/// Dual certificate of popularity: one exact rational per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub alpha: Vec<Rat>,
}

impl Witness {
    pub fn zeros(inst: &Instance) -> Witness {
        Witness {
            alpha: vec![Rat::zero(); inst.len()],
        }
    }

    pub fn from_i64(values: &[i64]) -> Witness {
        Witness {
            alpha: values
                .iter()
                .map(|&v| Rat::from_integer(v.into()))
                .collect(),
        }
    }

    /// True iff every entry lies in {0, +1, -1}.
    pub fn is_unit(&self) -> bool {
        self.alpha.iter().all(|a| a.is_zero() || a.abs().is_one())
    }
}

/// Checks the witness conditions: zero sum, every edge covered, every
/// self-loop covered.
pub fn verify_witness(inst: &Instance, m: &Matching, w: &Witness) -> bool {
    assert_eq!(w.alpha.len(), inst.len(), "witness must assign every node");
    let ws = weight_system(inst, m);
    let sum: Rat = w.alpha.iter().cloned().sum();
    if !sum.is_zero() {
        return false;
    }
    for (i, &(u, v)) in inst.edges().iter().enumerate() {
        if &w.alpha[u] + &w.alpha[v] < Rat::from_integer(ws.edge_wt[i].into()) {
            return false;
        }
    }
    for u in 0..inst.len() {
        if w.alpha[u] < Rat::from_integer(ws.loop_wt[u].into()) {
            return false;
        }
    }
    true
}

/// Searches for any rational witness by exact LP feasibility (bipartite only;
/// there a witness exists iff the matching is popular).
///
/// The LP substitutes `beta_u = alpha_u - wt_M(u,u) >= 0`, which folds the
/// self-loop constraints into nonnegativity, and solves the zero-sum equality
/// plus one covering inequality per edge with a phase-1 simplex under Bland's
/// rule.
pub fn find_witness(inst: &Instance, m: &Matching) -> Result<Option<Witness>> {
    if !inst.is_bipartite() {
        return Err(Error::NotBipartite("find_witness"));
    }
    let ws = weight_system(inst, m);
    let n = inst.len();
    let loop_wt: Vec<Rat> = ws
        .loop_wt
        .iter()
        .map(|&w| Rat::from_integer(w.into()))
        .collect();
    let eq = vec![(vec![Rat::one(); n], -loop_wt.iter().cloned().sum::<Rat>())];
    let mut ge = Vec::with_capacity(inst.edges().len());
    for (i, &(u, v)) in inst.edges().iter().enumerate() {
        let mut row = vec![Rat::zero(); n];
        row[u] = Rat::one();
        row[v] = Rat::one();
        let rhs = Rat::from_integer(ws.edge_wt[i].into()) - &loop_wt[u] - &loop_wt[v];
        ge.push((row, rhs));
    }
    let feas = Feasibility {
        vars: n,
        eq_rows: eq,
        ge_rows: ge,
    };
    Ok(feas.solve().map(|beta| {
        let alpha = beta.into_iter().zip(&loop_wt).map(|(b, w)| b + w).collect();
        let witness = Witness { alpha };
        debug_assert!(verify_witness(inst, m, &witness));
        witness
    }))
}

/// Finds a `{0, +1, -1}` witness of a popular matching in a bipartite
/// instance by backtracking over matched pairs.
///
/// Forced values: an unmatched node gets 0; an unstable matched node gets -1
/// (its partner +1); every matched pair sums to zero. Remaining pairs are
/// branched in the order 0, +1, -1 with covering-constraint propagation, so a
/// stable matching comes out as the all-zero witness.
pub fn find_unit_witness(inst: &Instance, m: &Matching) -> Result<Witness> {
    if !inst.is_bipartite() {
        return Err(Error::NotBipartite("find_unit_witness"));
    }
    let ws = weight_system(inst, m);
    let n = inst.len();

    // Stable nodes are matched in every stable matching; one run suffices.
    let stable_nodes: Vec<bool> = {
        let s = crate::stable::gale_shapley(inst, crate::instance::Side::A)?;
        (0..n).map(|u| s.is_matched(u)).collect()
    };

    // value[u] in {-1, 0, 1}, entries of `decided` say which are pinned.
    let mut value = vec![0i64; n];
    let mut decided = vec![false; n];
    for u in 0..n {
        if !m.is_matched(u) {
            value[u] = 0;
            decided[u] = true;
        }
    }
    let mut pairs: Vec<(NodeId, NodeId)> = m.edges().to_vec();
    pairs.sort_by(|a, b| (inst.name(a.0), inst.name(a.1)).cmp(&(inst.name(b.0), inst.name(b.1))));
    let mut forced: Vec<(NodeId, i64)> = Vec::new();
    for &(u, v) in &pairs {
        if !stable_nodes[u] {
            forced.push((u, -1));
        } else if !stable_nodes[v] {
            forced.push((v, -1));
        }
    }
    for (u, val) in forced {
        let p = m.partner(u).unwrap();
        value[u] = val;
        value[p] = -val;
        decided[u] = true;
        decided[p] = true;
    }
    let open: Vec<(NodeId, NodeId)> = pairs
        .iter()
        .copied()
        .filter(|&(u, _)| !decided[u])
        .collect();

    let edge_ok = |value: &[i64], decided: &[bool], wt: &[i64]| -> bool {
        for (i, &(u, v)) in inst.edges().iter().enumerate() {
            match (decided[u], decided[v]) {
                (true, true) => {
                    if value[u] + value[v] < wt[i] {
                        return false;
                    }
                }
                (true, false) => {
                    if value[u] + 1 < wt[i] {
                        return false;
                    }
                }
                (false, true) => {
                    if value[v] + 1 < wt[i] {
                        return false;
                    }
                }
                (false, false) => {
                    if 2 < wt[i] {
                        return false;
                    }
                }
            }
        }
        true
    };

    fn search(
        idx: usize,
        open: &[(NodeId, NodeId)],
        value: &mut [i64],
        decided: &mut [bool],
        edge_ok: &impl Fn(&[i64], &[bool], &[i64]) -> bool,
        wt: &[i64],
    ) -> bool {
        if !edge_ok(value, decided, wt) {
            return false;
        }
        let Some(&(u, v)) = open.get(idx) else {
            return true;
        };
        for val in [0i64, 1, -1] {
            value[u] = val;
            value[v] = -val;
            decided[u] = true;
            decided[v] = true;
            if search(idx + 1, open, value, decided, edge_ok, wt) {
                return true;
            }
            decided[u] = false;
            decided[v] = false;
        }
        false
    }

    if search(0, &open, &mut value, &mut decided, &edge_ok, &ws.edge_wt) {
        let witness = Witness::from_i64(&value);
        debug_assert!(verify_witness(inst, m, &witness));
        Ok(witness)
    } else {
        Err(Error::Precondition(
            "no unit witness: the matching is not popular".into(),
        ))
    }
}

/// Union of the given (popular) matchings' edges, plus the connected
/// components of the resulting subgraph. Isolated nodes form singleton
/// components. Components are sorted by their smallest member name.
pub fn popular_subgraph(
    inst: &Instance,
    popular: &[Matching],
) -> (BTreeSet<(NodeId, NodeId)>, Vec<Vec<NodeId>>) {
    let mut edges = BTreeSet::new();
    for m in popular {
        for &(u, v) in m.edges() {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let mut parent: Vec<usize> = (0..inst.len()).collect();
    fn find(parent: &mut Vec<usize>, u: usize) -> usize {
        if parent[u] != u {
            let root = find(parent, parent[u]);
            parent[u] = root;
        }
        parent[u]
    }
    for &(u, v) in &edges {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<NodeId>> = Default::default();
    for u in 0..inst.len() {
        let r = find(&mut parent, u);
        groups.entry(r).or_default().push(u);
    }
    let mut components: Vec<Vec<NodeId>> = groups.into_values().collect();
    for comp in &mut components {
        comp.sort_by(|&a, &b| inst.name(a).cmp(inst.name(b)));
    }
    components.sort_by(|a, b| inst.name(a[0]).cmp(inst.name(b[0])));
    (edges, components)
}

/// Builds the witness implied by a strong-dominance partition: +1 on R, -1 on
/// matched L-nodes, 0 on unmatched nodes.
pub fn partition_witness(inst: &Instance, m: &Matching, partition: &Partition) -> Witness {
    let mut alpha = vec![Rat::zero(); inst.len()];
    for &u in &partition.1 {
        alpha[u] = Rat::one();
    }
    for &u in &partition.0 {
        if m.is_matched(u) {
            alpha[u] = -Rat::one();
        }
    }
    Witness { alpha }
}

/// Reports the `LabeledGraph` alongside a check, for CLI display.
pub fn labels_for(inst: &Instance, m: &Matching) -> LabeledGraph {
    label_edges(inst, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_instance;
    use crate::rat;

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

    const ABCD_INSTANCE: &str = "\
popmatch v1 roommates
node a
node b
node c
node d
pref a: b c d
pref b: a c
pref c: a b
pref d: a
";

    #[test]
    fn d_matching_popular() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        assert!(is_popular_structural(&inst, &m).verdict);
    }

    #[test]
    fn abcd_matching_popular_dominant_not_strongly() {
        let inst = parse_instance(ABCD_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("a", "d"), ("b", "c")]).unwrap();
        assert!(is_popular_structural(&inst, &m).verdict);
        assert!(is_dominant_structural(&inst, &m).unwrap().verdict);
        assert!(is_strongly_dominant(&inst, &m).is_none());
    }

    #[test]
    fn d_bad_matching_rejected_with_certificate() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d3"), ("d1", "d2")]).unwrap();
        let cert = is_popular_structural(&inst, &m);
        assert!(!cert.verdict);
        assert!(cert.describe(&inst).unwrap().starts_with("violation"));
    }

    #[test]
    fn d_strongly_dominant_partition() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        let (l, r) = is_strongly_dominant(&inst, &m).expect("partition exists");
        let names = |v: &[NodeId]| {
            v.iter()
                .map(|&u| inst.name(u).to_string())
                .collect::<Vec<_>>()
        };
        assert_eq!(names(&l), ["d0", "d2"]);
        assert_eq!(names(&r), ["d1", "d3"]);
        let w = partition_witness(&inst, &m, &(l, r));
        assert!(verify_witness(&inst, &m, &w));
    }

    #[test]
    fn empty_instance_strongly_dominant() {
        let inst = parse_instance("popmatch v1 roommates\n").unwrap();
        let m = Matching::empty(&inst);
        let (l, r) = is_strongly_dominant(&inst, &m).unwrap();
        assert!(l.is_empty() && r.is_empty());
    }

    #[test]
    fn d_witness_accepted() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        // alpha indexed by declaration order d0, d1, d2, d3.
        let w = Witness::from_i64(&[-1, 1, -1, 1]);
        assert!(verify_witness(&inst, &m, &w));
    }

    #[test]
    fn abcd_admits_no_unit_witness() {
        let inst = parse_instance(ABCD_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("a", "d"), ("b", "c")]).unwrap();
        // Every {0, +/-1} vector fails: check exhaustively over pair values.
        let ws = weight_system(&inst, &m);
        let nodes: Vec<NodeId> = (0..4).collect();
        let mut found = false;
        for assign in 0..81u32 {
            let mut alpha = Vec::new();
            let mut x = assign;
            for _ in &nodes {
                alpha.push(i64::from(x % 3) - 1);
                x /= 3;
            }
            let w = Witness::from_i64(&alpha);
            if verify_witness(&inst, &m, &w) {
                found = true;
            }
        }
        assert!(!found);
        let _ = ws;
    }

    #[test]
    fn find_witness_on_stable_matching() {
        let text = "\
popmatch v1 bipartite
node a1 A
node a2 A
node b1 B
node b2 B
pref a1: b1 b2
pref a2: b2 b1
pref b1: a1 a2
pref b2: a2 a1
";
        let inst = parse_instance(text).unwrap();
        let m = Matching::from_names(&inst, &[("a1", "b1"), ("a2", "b2")]).unwrap();
        let w = find_witness(&inst, &m).unwrap().expect("stable is popular");
        assert!(verify_witness(&inst, &m, &w));
        let unit = find_unit_witness(&inst, &m).unwrap();
        assert_eq!(unit.alpha, vec![rat(0, 1); 4]);
    }

    #[test]
    fn find_witness_rejects_roommates() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        assert!(matches!(
            find_witness(&inst, &m),
            Err(Error::NotBipartite(_))
        ));
    }

    #[test]
    fn popular_subgraph_of_d_instance() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let m1 = Matching::from_names(&inst, &[("d0", "d1"), ("d2", "d3")]).unwrap();
        let m2 = Matching::from_names(&inst, &[("d0", "d2"), ("d1", "d3")]).unwrap();
        let (edges, comps) = popular_subgraph(&inst, &[m1, m2]);
        assert_eq!(edges.len(), 4);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 4);
    }
}

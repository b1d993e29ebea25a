//! Exhaustive ground truth on small instances.
//!
//! Everything here works straight from the definitions: a matching is popular
//! iff its vote margin against every other matching is nonnegative, dominant
//! iff it additionally wins strictly against every larger matching, strongly
//! dominant iff some partition over all 2^n node splits satisfies the four
//! partition conditions. Budgets are enforced explicitly: an aborted
//! enumeration is an error, never a silent truncation.

use num::Zero;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, NodeId};
use crate::labeling::{delta, label_edges};
use crate::{EdgeLabel, Rat};

/// Enumeration limits. Exceeding one aborts with [`Error::BudgetExceeded`].
#[derive(Debug, Clone)]
pub struct OracleBudget {
    pub max_nodes: usize,
    pub max_matchings: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_nodes: 12,
            max_matchings: 10_000_000,
        }
    }
}

/// All matchings of the instance (including the empty one), in canonical
/// order: sorted lexicographically by their canonical-edge-index sets.
pub fn enumerate_matchings(inst: &Instance, budget: &OracleBudget) -> Result<Vec<Matching>> {
    if inst.len() > budget.max_nodes {
        return Err(Error::BudgetExceeded(format!(
            "{} nodes exceed the {}-node oracle budget",
            inst.len(),
            budget.max_nodes
        )));
    }
    let edges = inst.edges();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut used = vec![false; inst.len()];
    let mut chosen: Vec<usize> = Vec::new();

    fn go(
        i: usize,
        edges: &[(NodeId, NodeId)],
        used: &mut [bool],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if out.len() > cap {
            return Err(Error::BudgetExceeded(format!("more than {cap} matchings")));
        }
        if i == edges.len() {
            out.push(chosen.clone());
            return Ok(());
        }
        // Exclude edge i, then include it if both endpoints are free.
        go(i + 1, edges, used, chosen, out, cap)?;
        let (u, v) = edges[i];
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            chosen.push(i);
            go(i + 1, edges, used, chosen, out, cap)?;
            chosen.pop();
            used[u] = false;
            used[v] = false;
        }
        Ok(())
    }
    go(
        0,
        edges,
        &mut used,
        &mut chosen,
        &mut out,
        budget.max_matchings,
    )?;
    out.sort();
    out.into_iter()
        .map(|idxs| Matching::new(inst, idxs.into_iter().map(|i| edges[i])))
        .collect()
}

/// Per-matching classification flags.
#[derive(Debug, Clone)]
pub struct Classification {
    pub matchings: Vec<Matching>,
    pub stable: Vec<bool>,
    pub popular: Vec<bool>,
    pub dominant: Vec<bool>,
    pub strongly_dominant: Vec<bool>,
}

impl Classification {
    pub fn popular_matchings(&self) -> Vec<&Matching> {
        self.matchings
            .iter()
            .zip(&self.popular)
            .filter(|(_, &p)| p)
            .map(|(m, _)| m)
            .collect()
    }

    pub fn indices_where(&self, flags: &[bool]) -> Vec<usize> {
        flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Definition 5 checked verbatim against one candidate node split.
fn partition_is_strongly_dominant(inst: &Instance, m: &Matching, in_r: u64) -> bool {
    let r = |u: NodeId| in_r >> u & 1 == 1;
    // M inside L x R, R fully matched.
    for &(u, v) in m.edges() {
        if r(u) == r(v) {
            return false;
        }
    }
    for u in 0..inst.len() {
        if r(u) && !m.is_matched(u) {
            return false;
        }
    }
    let lg = label_edges(inst, m);
    for (&(u, v), &label) in inst.edges().iter().zip(&lg.labels) {
        match label {
            EdgeLabel::PlusPlus if !(r(u) && r(v)) => return false,
            EdgeLabel::PlusMinus | EdgeLabel::MinusPlus if !r(u) && !r(v) => return false,
            _ => {}
        }
    }
    true
}

/// Classifies every matching of the instance, with `jobs` worker threads for
/// the pairwise vote comparisons. Consistency relations (stable implies
/// popular, strongly dominant implies dominant implies popular) are asserted.
pub fn classify_with_jobs(
    inst: &Instance,
    budget: &OracleBudget,
    jobs: usize,
) -> Result<Classification> {
    let matchings = enumerate_matchings(inst, budget)?;
    let k = matchings.len();

    let stable: Vec<bool> = matchings
        .iter()
        .map(|m| {
            label_edges(inst, m)
                .labels
                .iter()
                .all(|&l| l != EdgeLabel::PlusPlus)
        })
        .collect();

    let classify_range = |lo: usize, hi: usize| -> Vec<(bool, bool)> {
        (lo..hi)
            .map(|i| {
                let mut popular = true;
                let mut dominant = true;
                for j in 0..k {
                    if i == j {
                        continue;
                    }
                    let d = delta(inst, &matchings[i], &matchings[j]);
                    if d < 0 {
                        popular = false;
                        dominant = false;
                        break;
                    }
                    if d == 0 && matchings[j].len() > matchings[i].len() {
                        dominant = false;
                    }
                }
                (popular, popular && dominant)
            })
            .collect()
    };

    let pop_dom: Vec<(bool, bool)> = if jobs <= 1 || k < 64 {
        classify_range(0, k)
    } else {
        let chunk = k.div_ceil(jobs);
        let mut parts: Vec<Vec<(bool, bool)>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|t| {
                    let lo = (t * chunk).min(k);
                    let hi = ((t + 1) * chunk).min(k);
                    scope.spawn(move || classify_range(lo, hi))
                })
                .collect();
            for h in handles {
                parts.push(h.join().expect("classification worker panicked"));
            }
        });
        parts.concat()
    };
    let popular: Vec<bool> = pop_dom.iter().map(|&(p, _)| p).collect();
    let dominant: Vec<bool> = pop_dom.iter().map(|&(_, d)| d).collect();

    let strongly_dominant: Vec<bool> = matchings
        .iter()
        .map(|m| {
            let n = inst.len();
            (0u64..1 << n).any(|mask| partition_is_strongly_dominant(inst, m, mask))
        })
        .collect();

    for i in 0..k {
        assert!(!stable[i] || popular[i], "stable matching must be popular");
        assert!(
            !dominant[i] || popular[i],
            "dominant matching must be popular"
        );
        assert!(
            !strongly_dominant[i] || dominant[i],
            "strongly dominant matching must be dominant"
        );
    }

    Ok(Classification {
        matchings,
        stable,
        popular,
        dominant,
        strongly_dominant,
    })
}

pub fn classify(inst: &Instance, budget: &OracleBudget) -> Result<Classification> {
    classify_with_jobs(inst, budget, 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MinCostPopular,
    MaxWeightPopular,
}

/// Tie-break key: among equal-cost matchings prefer the one whose canonical
/// edge-index set is smallest as a binary number. This is exactly the order
/// induced by the standard power-of-two cost perturbation, so the treewidth
/// solver and this oracle agree on ties.
pub fn edge_mask(inst: &Instance, m: &Matching) -> u128 {
    let mut mask = 0u128;
    for &(u, v) in m.edges() {
        mask |= 1 << inst.edge_index(u, v).expect("matching edge");
    }
    mask
}

/// Exact optimum of the objective over the popular matchings; `None` iff no
/// popular matching exists.
pub fn optimize(
    inst: &Instance,
    objective: Objective,
    budget: &OracleBudget,
) -> Result<Option<(Matching, Rat)>> {
    let cls = classify(inst, budget)?;
    let mut best: Option<(Rat, u128, Matching)> = None;
    for (i, m) in cls.matchings.iter().enumerate() {
        if !cls.popular[i] {
            continue;
        }
        let cost = inst.matching_cost(m);
        let mask = edge_mask(inst, m);
        let better = match &best {
            None => true,
            Some((bc, bm, _)) => match objective {
                Objective::MinCostPopular => cost < *bc || (cost == *bc && mask < *bm),
                Objective::MaxWeightPopular => cost > *bc || (cost == *bc && mask < *bm),
            },
        };
        if better {
            best = Some((cost, mask, m.clone()));
        }
    }
    Ok(best.map(|(c, _, m)| (m, c)))
}

/// Popular matching with forced/forbidden elements: contains every edge of
/// `e1`, avoids every edge of `e0`, matches every node of `u1`, leaves every
/// node of `u0` unmatched. `None` iff no popular matching qualifies.
pub fn pmffe(
    inst: &Instance,
    e0: &[(NodeId, NodeId)],
    e1: &[(NodeId, NodeId)],
    u0: &[NodeId],
    u1: &[NodeId],
    budget: &OracleBudget,
) -> Result<Option<Matching>> {
    // Forced edges must themselves form a matching.
    Matching::new(inst, e1.iter().copied())
        .map_err(|e| Error::Precondition(format!("forced edge set: {e}")))?;
    let cls = classify(inst, budget)?;
    for (i, m) in cls.matchings.iter().enumerate() {
        if !cls.popular[i] {
            continue;
        }
        let has_all = e1.iter().all(|&(u, v)| m.contains(u, v));
        let avoids = e0.iter().all(|&(u, v)| !m.contains(u, v));
        let matches_u1 = u1.iter().all(|&u| m.is_matched(u));
        let avoids_u0 = u0.iter().all(|&u| !m.is_matched(u));
        if has_all && avoids && matches_u1 && avoids_u0 {
            return Ok(Some(m.clone()));
        }
    }
    Ok(None)
}

/// Max-weight matching over an arbitrary flagged subset, shared by the
/// dominant-matching helpers. Ties prefer the smaller edge mask.
pub fn max_weight_among(inst: &Instance, candidates: &[&Matching]) -> Option<(Matching, Rat)> {
    let mut best: Option<(Rat, u128, Matching)> = None;
    for m in candidates {
        let cost = inst.matching_cost(m);
        let mask = edge_mask(inst, m);
        let better = match &best {
            None => true,
            Some((bc, bm, _)) => cost > *bc || (cost == *bc && mask < *bm),
        };
        if better {
            best = Some((cost, mask, (*m).clone()));
        }
    }
    best.map(|(c, _, m)| (m, c))
}

/// Convenience: `Rat::zero()` comparisons show up in callers.
pub fn zero() -> Rat {
    Rat::zero()
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

    #[test]
    fn matching_counts() {
        let budget = OracleBudget::default();
        let single =
            parse_instance("popmatch v1 roommates\nnode u\nnode v\npref u: v\npref v: u\n")
                .unwrap();
        assert_eq!(enumerate_matchings(&single, &budget).unwrap().len(), 2);
        let d = parse_instance(D_INSTANCE).unwrap();
        assert_eq!(enumerate_matchings(&d, &budget).unwrap().len(), 10);
        let empty = parse_instance("popmatch v1 roommates\n").unwrap();
        assert_eq!(enumerate_matchings(&empty, &budget).unwrap().len(), 1);
    }

    #[test]
    fn d_instance_classification() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let cls = classify(&inst, &OracleBudget::default()).unwrap();
        assert!(
            cls.stable.iter().all(|&s| !s),
            "d-instance has no stable matching"
        );
        let popular: Vec<_> = cls
            .matchings
            .iter()
            .zip(&cls.popular)
            .filter(|(_, &p)| p)
            .map(|(m, _)| m.edge_names(&inst))
            .collect();
        assert_eq!(
            popular,
            vec![
                vec![("d0", "d1"), ("d2", "d3")],
                vec![("d0", "d2"), ("d1", "d3")],
            ]
        );
        for i in 0..cls.matchings.len() {
            assert_eq!(cls.popular[i], cls.dominant[i]);
            assert_eq!(cls.popular[i], cls.strongly_dominant[i]);
        }
    }

    #[test]
    fn abcd_not_strongly_dominant() {
        let text = "\
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
        let inst = parse_instance(text).unwrap();
        let cls = classify(&inst, &OracleBudget::default()).unwrap();
        let m = Matching::from_names(&inst, &[("a", "d"), ("b", "c")]).unwrap();
        let i = cls.matchings.iter().position(|x| *x == m).unwrap();
        assert!(cls.popular[i]);
        assert!(cls.dominant[i]);
        assert!(!cls.strongly_dominant[i]);
    }

    #[test]
    fn optimize_min_cost() {
        let mut text = String::from(D_INSTANCE);
        text.push_str("cost d0 d1: 1/1\n");
        let inst = parse_instance(&text).unwrap();
        let (m, c) = optimize(&inst, Objective::MinCostPopular, &OracleBudget::default())
            .unwrap()
            .expect("popular matching exists");
        assert_eq!(c, rat(0, 1));
        assert_eq!(m.edge_names(&inst), vec![("d0", "d2"), ("d1", "d3")]);
    }

    #[test]
    fn pmffe_examples() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let budget = OracleBudget::default();
        let d0 = inst.node("d0").unwrap();
        let d1 = inst.node("d1").unwrap();
        // Forcing an edge of a popular matching finds that matching.
        let m = pmffe(&inst, &[], &[(d0, d1)], &[], &[], &budget)
            .unwrap()
            .unwrap();
        assert!(m.contains(d0, d1));
        // Forbidding all nodes: only the empty matching qualifies, and it is
        // not popular here.
        let all: Vec<NodeId> = (0..inst.len()).collect();
        assert!(pmffe(&inst, &[], &[], &all, &[], &budget)
            .unwrap()
            .is_none());
        // Contradictory forced and forbidden edge.
        assert!(pmffe(&inst, &[(d0, d1)], &[(d0, d1)], &[], &[], &budget)
            .unwrap()
            .is_none());
    }

    #[test]
    fn budget_violation_is_explicit() {
        let inst = parse_instance(D_INSTANCE).unwrap();
        let budget = OracleBudget {
            max_nodes: 2,
            max_matchings: 10,
        };
        assert!(matches!(
            enumerate_matchings(&inst, &budget),
            Err(Error::BudgetExceeded(_))
        ));
    }
}

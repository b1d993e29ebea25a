//! The leader-table dynamic program over a dichotomic tree decomposition.
//!
//! Bags are processed predecessors-first. A leaf bag enumerates its bag
//! matchings directly; an internal bag combines each bag matching with one
//! stored leader per predecessor, requiring agreement on the induced
//! matchings of the shared separators, and evaluates local popularity and
//! activity of the combination through shortcut graphs built from every pair
//! of maximal active configurations of the predecessors' tipping points.
//! Tables keep, per tipping point, only the cheapest (perturbed-cost)
//! matching seen. At the root the separator is empty, every locally popular
//! matching is popular, all tipping points coincide, and the single surviving
//! leader is the minimum-cost popular matching.

use std::collections::{BTreeMap, BTreeSet};

use num::Zero;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, NodeId};
use crate::treewidth::config::{
    s_matching_of, tipping_point_direct, tipping_point_of_view, SeparatorView, TippingCerts,
    TippingPoint,
};
use crate::treewidth::decomposition::DichotomicDecomposition;
use crate::treewidth::perturb_costs;
use crate::treewidth::shortcut::{build_shortcut_graph, SideConfig};
use crate::Rat;

struct Leader {
    edges: BTreeSet<(NodeId, NodeId)>,
    cost: Rat,
    certs: TippingCerts,
}
type Table = BTreeMap<TippingPoint, Leader>;

/// Minimum-cost popular matching, or `None` iff no popular matching exists.
pub fn min_cost_popular_tw(
    inst: &Instance,
    dtd: &DichotomicDecomposition,
) -> Result<Option<(Matching, Rat)>> {
    min_cost_popular_tw_checked(inst, dtd, false)
}

/// Same, optionally cross-checking every shortcut-graph evaluation against a
/// direct computation on the full processed subtree (small subtrees only).
pub fn min_cost_popular_tw_checked(
    inst: &Instance,
    dtd: &DichotomicDecomposition,
    assert_internal: bool,
) -> Result<Option<(Matching, Rat)>> {
    let pert = perturb_costs(inst);
    let order = dtd.bottom_up_order();
    let mut tables: BTreeMap<usize, Table> = BTreeMap::new();

    for &b in &order {
        let bag = &dtd.bags[b];
        let s_nodes: Vec<NodeId> = match dtd.successor[b] {
            Some(succ) => bag.intersection(&dtd.bags[succ]).copied().collect(),
            None => Vec::new(),
        };
        let subtree = dtd.subtree_nodes(b);
        let x_nodes: Vec<NodeId> = subtree
            .iter()
            .copied()
            .filter(|u| !s_nodes.contains(u))
            .collect();

        let bag_matchings = enumerate_bag_matchings(&pert, bag)?;
        let mut table: Table = BTreeMap::new();

        match dtd.predecessors[b].len() {
            0 => {
                for m in &bag_matchings {
                    let sv = SeparatorView::restricted(&pert, m, &s_nodes, &x_nodes);
                    if sv.view.find_forbidden_structure().is_some() {
                        continue;
                    }
                    let (tp, certs) =
                        tipping_point_of_view(&sv, s_matching_of(&pert, m, &s_nodes))?;
                    let edges: BTreeSet<(NodeId, NodeId)> = m.edges().iter().copied().collect();
                    let cost = edge_cost(&pert, &edges);
                    update(&mut table, tp, Leader { edges, cost, certs });
                }
            }
            preds_len @ (1 | 2) => {
                let b1 = dtd.predecessors[b][0];
                let b2 = (preds_len == 2).then(|| dtd.predecessors[b][1]);
                let s1: Vec<NodeId> = bag.intersection(&dtd.bags[b1]).copied().collect();
                let sub1 = dtd.subtree_nodes(b1);
                let (s2, sub2) = match b2 {
                    Some(b2) => (
                        bag.intersection(&dtd.bags[b2]).copied().collect::<Vec<_>>(),
                        dtd.subtree_nodes(b2),
                    ),
                    None => (Vec::new(), BTreeSet::new()),
                };
                let t1 = tables.get(&b1).expect("predecessor processed");
                let virtual_side = {
                    // Virtual empty side: one empty leader keyed by the
                    // trivial tipping point.
                    let mut t = Table::new();
                    t.insert(
                        TippingPoint {
                            max_configs: BTreeSet::new(),
                            s_matching: Vec::new(),
                        },
                        Leader {
                            edges: BTreeSet::new(),
                            cost: Rat::zero(),
                            certs: TippingCerts::new(),
                        },
                    );
                    t
                };
                let t2: &Table = match b2 {
                    Some(b2) => tables.get(&b2).expect("predecessor processed"),
                    None => &virtual_side,
                };

                let mut updates: Vec<(TippingPoint, Leader)> = Vec::new();
                for m in &bag_matchings {
                    let m_s1 = s_matching_of(&pert, m, &s1);
                    let m_s2 = s_matching_of(&pert, m, &s2);
                    for (tp1, leader1) in t1 {
                        if tp1.s_matching != m_s1 {
                            continue;
                        }
                        for (tp2, leader2) in t2 {
                            if b2.is_some() && tp2.s_matching != m_s2 {
                                continue;
                            }
                            let mut union: BTreeSet<(NodeId, NodeId)> =
                                m.edges().iter().copied().collect();
                            union.extend(leader1.edges.iter().copied());
                            union.extend(leader2.edges.iter().copied());
                            let combined =
                                Matching::new(&pert, union.iter().copied()).map_err(|e| {
                                    Error::InternalCheck(format!(
                                        "leader union is not a matching: {e}"
                                    ))
                                })?;
                            let evaluated = evaluate_combination(
                                &pert,
                                bag,
                                m,
                                &s_nodes,
                                tp1,
                                leader1,
                                tp2,
                                leader2,
                                b2.is_some(),
                                &sub1,
                                &sub2,
                            )?;
                            let Some((tp, certs)) = evaluated else {
                                continue;
                            };

                            if assert_internal && subtree.len() <= 12 {
                                verify_against_direct(&pert, &s_nodes, &x_nodes, &combined, &tp)
                                    .map_err(|e| {
                                        Error::InternalCheck(format!(
                                            "{e}\nbag={bag:?} s={s_nodes:?} x={x_nodes:?}\n\
                                             m={:?}\ncombined={:?}\ntp1={tp1:?}\ntp2={tp2:?}",
                                            m.edges(),
                                            combined.edges()
                                        ))
                                    })?;
                            }

                            // Cost over the union handles edges shared with
                            // the predecessors exactly once.
                            let cost = edge_cost(&pert, &union);
                            updates.push((
                                tp,
                                Leader {
                                    edges: union,
                                    cost,
                                    certs,
                                },
                            ));
                        }
                    }
                }
                for (tp, leader) in updates {
                    update(&mut table, tp, leader);
                }
            }
            n => {
                return Err(Error::Precondition(format!(
                    "bag {b} has {n} predecessors; the decomposition is not dichotomic"
                )))
            }
        }

        if table.is_empty() {
            return Ok(None);
        }
        tables.insert(b, table);
    }

    let root_table = tables.get(&dtd.root).expect("root processed");
    debug_assert!(
        root_table.len() == 1,
        "empty root separator admits one tipping point"
    );
    let leader = root_table.values().next().expect("nonempty");
    let matching = Matching::new(inst, leader.edges.iter().copied())?;
    let original_cost = inst.matching_cost(&matching);
    Ok(Some((matching, original_cost)))
}

/// Local popularity and tipping point of `m u M1 u M2` via shortcut graphs
/// over every pair of maximal predecessor configurations, replaying the
/// stored certificates. `None` when the combination is not locally popular.
#[allow(clippy::too_many_arguments)]
fn evaluate_combination(
    pert: &Instance,
    bag: &BTreeSet<NodeId>,
    m: &Matching,
    s_nodes: &[NodeId],
    tp1: &TippingPoint,
    leader1: &Leader,
    tp2: &TippingPoint,
    leader2: &Leader,
    has_second: bool,
    sub1: &BTreeSet<NodeId>,
    sub2: &BTreeSet<NodeId>,
) -> Result<Option<(TippingPoint, TippingCerts)>> {
    let empty_config = crate::treewidth::config::Configuration::default();
    let empty_certs: Vec<crate::treewidth::config::PathCert> = Vec::new();
    let side_entries = |tp: &TippingPoint,
                        leader: &Leader|
     -> Vec<(
        crate::treewidth::config::Configuration,
        Vec<crate::treewidth::config::PathCert>,
    )> {
        if tp.max_configs.is_empty() {
            vec![(empty_config.clone(), empty_certs.clone())]
        } else {
            tp.max_configs
                .iter()
                .map(|c| {
                    let certs = leader.certs.get(c).cloned().unwrap_or_default();
                    (c.clone(), certs)
                })
                .collect()
        }
    };
    let c1s = side_entries(tp1, leader1);
    let c2s = if has_second {
        side_entries(tp2, leader2)
    } else {
        vec![(empty_config.clone(), empty_certs.clone())]
    };

    let mut collected: TippingCerts = TippingCerts::new();
    for (c1, certs1) in &c1s {
        for (c2, certs2) in &c2s {
            let mut sides = vec![SideConfig {
                config: c1,
                certs: certs1,
                subtree: sub1,
            }];
            if has_second {
                sides.push(SideConfig {
                    config: c2,
                    certs: certs2,
                    subtree: sub2,
                });
            }
            let sv = build_shortcut_graph(pert, bag, m, s_nodes, &sides)?;
            if sv.view.find_forbidden_structure().is_some() {
                return Ok(None);
            }
            let (_, certs_h) = tipping_point_of_view(&sv, Vec::new())?;
            for (config, cert) in certs_h {
                collected.entry(config).or_insert(cert);
            }
        }
    }
    let keys: BTreeSet<_> = collected.keys().cloned().collect();
    let maximal = crate::treewidth::config::maximal_antichain(keys);
    collected.retain(|k, _| maximal.contains(k));
    Ok(Some((
        TippingPoint {
            max_configs: collected.keys().cloned().collect(),
            s_matching: s_matching_of(pert, m, s_nodes),
        },
        collected,
    )))
}

fn verify_against_direct(
    pert: &Instance,
    s_nodes: &[NodeId],
    x_nodes: &[NodeId],
    combined: &Matching,
    shortcut_tp: &TippingPoint,
) -> Result<()> {
    let direct = tipping_point_direct(pert, s_nodes, x_nodes, combined)?;
    if &direct != shortcut_tp {
        return Err(Error::InternalCheck(format!(
            "shortcut tipping point disagrees with direct computation: {:?} vs {:?}",
            shortcut_tp, direct
        )));
    }
    Ok(())
}

fn edge_cost(inst: &Instance, edges: &BTreeSet<(NodeId, NodeId)>) -> Rat {
    edges.iter().map(|&(u, v)| inst.cost(u, v).clone()).sum()
}

fn update(table: &mut Table, tp: TippingPoint, leader: Leader) {
    match table.get_mut(&tp) {
        Some(stored) => {
            if leader.cost < stored.cost {
                *stored = leader;
            }
        }
        None => {
            table.insert(tp, leader);
        }
    }
}

/// All matchings consisting of edges with at least one endpoint in the bag.
fn enumerate_bag_matchings(inst: &Instance, bag: &BTreeSet<NodeId>) -> Result<Vec<Matching>> {
    let edges: Vec<(NodeId, NodeId)> = inst
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| bag.contains(&u) || bag.contains(&v))
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<(NodeId, NodeId)> = Vec::new();
    let mut used = vec![false; inst.len()];
    fn go(
        i: usize,
        edges: &[(NodeId, NodeId)],
        used: &mut [bool],
        chosen: &mut Vec<(NodeId, NodeId)>,
        out: &mut Vec<Vec<(NodeId, NodeId)>>,
    ) {
        if i == edges.len() {
            out.push(chosen.clone());
            return;
        }
        go(i + 1, edges, used, chosen, out);
        let (u, v) = edges[i];
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            chosen.push(edges[i]);
            go(i + 1, edges, used, chosen, out);
            chosen.pop();
            used[u] = false;
            used[v] = false;
        }
    }
    let mut sets = Vec::new();
    go(0, &edges, &mut used, &mut chosen, &mut sets);
    if sets.len() > 5_000_000 {
        return Err(Error::BudgetExceeded("bag matching enumeration".into()));
    }
    for set in sets {
        out.push(Matching::new(inst, set)?);
    }
    Ok(out)
}

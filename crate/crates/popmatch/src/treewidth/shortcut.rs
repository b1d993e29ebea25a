//! Shortcut graphs: a bag-sized stand-in for the full processed subtree.
//!
//! For a bag matching `M` and one maximal active configuration per
//! predecessor, the shortcut graph starts from `G_M[B]` and adds, per
//! configuration pair, a fresh chain that replays the certificate path
//! stored with the predecessor's tipping point, edge kind by edge kind. The
//! result is a vertex-renamed subgraph of the real `G_M` over the bag and
//! the certificate paths, so activity and local popularity computed on it
//! never see structures the processed subtree lacks.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::instance::{Instance, Matching, NodeId};
use crate::structure::{EdgeKind, LocalView};
use crate::treewidth::config::{Configuration, DecoratedPair, End, PathCert, SeparatorView};

/// One side of the combination step: a configuration, the certificates of
/// its pairs (aligned with the sorted pair order), and the node set of the
/// closed subtree it came from.
pub struct SideConfig<'a> {
    pub config: &'a Configuration,
    pub certs: &'a [PathCert],
    pub subtree: &'a BTreeSet<NodeId>,
}

/// Builds the shortcut graph for bag `bag`, bag matching `m`, and up to two
/// predecessor configurations. Returns the separator view whose `S`-flags
/// mark `s_nodes`.
pub fn build_shortcut_graph(
    inst: &Instance,
    bag: &BTreeSet<NodeId>,
    m: &Matching,
    s_nodes: &[NodeId],
    sides: &[SideConfig<'_>],
) -> Result<SeparatorView> {
    let mut keep = vec![false; inst.len()];
    for &u in bag {
        keep[u] = true;
    }
    let base = LocalView::restricted(inst, m, &keep);
    let ids: Vec<NodeId> = (0..inst.len()).filter(|&u| keep[u]).collect();
    let local: std::collections::HashMap<NodeId, usize> =
        ids.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    let s_set: BTreeSet<NodeId> = s_nodes.iter().copied().collect();

    let mut view = base;
    let mut in_s: Vec<bool> = ids.iter().map(|u| s_set.contains(u)).collect();
    let mut real_id: Vec<Option<NodeId>> = ids.iter().map(|&u| Some(u)).collect();
    // Nodes that already handed their off-bag matching edge to a chain.
    let mut matched_attach_used = vec![false; view.len()];
    let mut fresh_counter = 0usize;

    for side in sides {
        if side.config.pairs.len() != side.certs.len() {
            return Err(Error::InternalCheck(
                "configuration and certificate lengths differ".into(),
            ));
        }
        for (pair, cert) in side.config.pairs.iter().zip(side.certs) {
            realize_pair(
                inst,
                m,
                side,
                pair,
                cert,
                &local,
                &mut view,
                &mut in_s,
                &mut real_id,
                &mut matched_attach_used,
                &mut fresh_counter,
            )?;
        }
    }
    Ok(SeparatorView {
        view,
        in_s,
        real_id,
    })
}

#[allow(clippy::too_many_arguments)]
fn realize_pair(
    inst: &Instance,
    m: &Matching,
    side: &SideConfig<'_>,
    pair: &DecoratedPair,
    cert: &PathCert,
    local: &std::collections::HashMap<NodeId, usize>,
    view: &mut LocalView,
    in_s: &mut Vec<bool>,
    real_id: &mut Vec<Option<NodeId>>,
    matched_attach_used: &mut Vec<bool>,
    fresh_counter: &mut usize,
) -> Result<()> {
    let kinds = &cert.kinds;
    if kinds.is_empty() {
        return Err(Error::InternalCheck("empty certificate path".into()));
    }
    // Certificate consistency with the declared decoration.
    let plus = kinds.iter().filter(|&&k| k == EdgeKind::PlusPlus).count() as u8;
    let par = |k: EdgeKind| u8::from(k != EdgeKind::Matched);
    if plus != pair.level.1 || (par(kinds[0]), par(*kinds.last().unwrap())) != pair.parity {
        return Err(Error::InternalCheck(format!(
            "certificate {kinds:?} does not realize pair {pair:?}"
        )));
    }

    let resolve = |e: End| -> Result<Option<usize>> {
        match e {
            End::Free => Ok(None),
            End::Node(u) => local.get(&u).copied().map(Some).ok_or_else(|| {
                Error::InternalCheck(format!("endpoint {} not in bag", inst.name(u)))
            }),
        }
    };
    let lu = resolve(pair.ends.0)?;
    let lv = resolve(pair.ends.1)?;

    // A single-edge certificate between two separator nodes is the real bag
    // edge, which the base view already carries with an agreeing label.
    if let (Some(a), Some(b)) = (lu, lv) {
        if kinds.len() == 1 {
            let present = match kinds[0] {
                EdgeKind::Matched => view.matched[a] == Some(b),
                k => view.adj[a].iter().any(|&(w, wk)| w == b && wk == k),
            };
            if !present {
                return Err(Error::InternalCheck(format!(
                    "single-edge certificate for {pair:?} has no matching bag edge"
                )));
            }
            return Ok(());
        }
    }

    // Matched end edges at separator nodes consume the node's off-bag
    // matching edge; the node must be covered towards the right subtree.
    let check_matched_end =
        |view: &LocalView, l: Option<usize>, end_kind: EdgeKind| -> Result<()> {
            let Some(i) = l else { return Ok(()) };
            if end_kind == EdgeKind::Matched {
                let u = real_id[i].expect("bag node");
                if !view.covered[i] {
                    return Err(Error::InternalCheck(format!(
                        "endpoint {} must be matched into the processed subtree",
                        inst.name(u)
                    )));
                }
                let partner = m.partner(u).expect("covered nodes are matched");
                if !side.subtree.contains(&partner) {
                    return Err(Error::InternalCheck(format!(
                        "endpoint {} matched outside the configuration's subtree",
                        inst.name(u)
                    )));
                }
                if matched_attach_used[i] {
                    return Err(Error::InternalCheck(format!(
                        "endpoint {} used twice with a matching end edge",
                        inst.name(u)
                    )));
                }
            }
            Ok(())
        };
    check_matched_end(view, lu, kinds[0])?;
    check_matched_end(view, lv, *kinds.last().unwrap())?;

    fn fresh_node(
        view: &mut LocalView,
        in_s: &mut Vec<bool>,
        real_id: &mut Vec<Option<NodeId>>,
        matched_attach_used: &mut Vec<bool>,
        fresh_counter: &mut usize,
        covered: bool,
    ) -> usize {
        let idx = view.len();
        view.names.push(format!("~sc{}", *fresh_counter));
        *fresh_counter += 1;
        view.matched.push(None);
        view.covered.push(covered);
        view.adj.push(Vec::new());
        in_s.push(false);
        real_id.push(None);
        matched_attach_used.push(false);
        idx
    }

    // Free end nodes: matched on-path when the end edge is a matching edge,
    // otherwise exposed or covered exactly as in the certificate.
    let end0 = match lu {
        Some(i) => i,
        None => {
            let covered = kinds[0] != EdgeKind::Matched && !cert.end_exposed.0;
            fresh_node(
                view,
                in_s,
                real_id,
                matched_attach_used,
                fresh_counter,
                covered,
            )
        }
    };
    let end1 = match lv {
        Some(i) => i,
        None => {
            let covered = *kinds.last().unwrap() != EdgeKind::Matched && !cert.end_exposed.1;
            fresh_node(
                view,
                in_s,
                real_id,
                matched_attach_used,
                fresh_counter,
                covered,
            )
        }
    };

    let mut nodes = vec![end0];
    for _ in 0..kinds.len().saturating_sub(1) {
        nodes.push(fresh_node(
            view,
            in_s,
            real_id,
            matched_attach_used,
            fresh_counter,
            false,
        ));
    }
    nodes.push(end1);

    for (i, &k) in kinds.iter().enumerate() {
        let (a, b) = (nodes[i], nodes[i + 1]);
        if k == EdgeKind::Matched {
            for &e in [a, b].iter() {
                if view.matched[e].is_some() {
                    return Err(Error::InternalCheck(format!(
                        "certificate chain would double-match view node {}",
                        view.names[e]
                    )));
                }
            }
            // A covered bag endpoint hands its off-bag matching edge to the
            // chain; fresh interior nodes are plainly unmatched.
            for &e in [a, b].iter() {
                if view.covered[e] {
                    view.covered[e] = false;
                    matched_attach_used[e] = true;
                }
            }
            view.matched[a] = Some(b);
            view.matched[b] = Some(a);
        }
        view.adj[a].push((b, k));
        view.adj[b].push((a, k));
    }
    Ok(())
}

//! Property tests for the core data model: the vote margin against a
//! matching equals the weight of the self-loop completion under that
//! matching's weight system, margins are antisymmetric, labeling partitions
//! the edge set, and the instance text format round-trips.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use popmatch::instance::{Instance, InstanceKind, Matching, Side};
use popmatch::io::{parse_instance, write_instance};
use popmatch::labeling::{delta, label_edges, weight_system};
use popmatch::EdgeLabel;

fn build_instance(seed: u64, n: usize, bipartite: bool) -> Instance {
    let mut rng = StdRng::seed_from_u64(seed);
    let kind = if bipartite {
        InstanceKind::Bipartite
    } else {
        InstanceKind::Roommates
    };
    let sides: Vec<Option<Side>> = (0..n)
        .map(|u| bipartite.then_some(if u % 2 == 0 { Side::A } else { Side::B }))
        .collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if bipartite && sides[u] == sides[v] {
                continue;
            }
            if rng.random_bool(0.6) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    let nodes: Vec<(String, Option<Side>)> = (0..n).map(|u| (format!("n{u}"), sides[u])).collect();
    let mut prefs = BTreeMap::new();
    for u in 0..n {
        let mut list: Vec<String> = adj[u].iter().map(|&v| format!("n{v}")).collect();
        list.shuffle(&mut rng);
        prefs.insert(format!("n{u}"), list);
    }
    Instance::new(kind, nodes, prefs, Vec::new()).unwrap()
}

fn random_matching(inst: &Instance, seed: u64) -> Matching {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = inst.edges().to_vec();
    edges.shuffle(&mut rng);
    let mut used = vec![false; inst.len()];
    let mut pairs = Vec::new();
    for (u, v) in edges {
        if !used[u] && !used[v] && rng.random_bool(0.6) {
            used[u] = true;
            used[v] = true;
            pairs.push((u, v));
        }
    }
    Matching::new(inst, pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    /// delta(N, M) = wt_M of the self-loop completion of N.
    #[test]
    fn margin_equals_completion_weight(
        seed in any::<u64>(),
        n in 2usize..=8,
        bipartite in any::<bool>(),
        mseed in any::<u64>(),
        nseed in any::<u64>(),
    ) {
        let inst = build_instance(seed, n, bipartite);
        let m = random_matching(&inst, mseed);
        let other = random_matching(&inst, nseed);
        let ws = weight_system(&inst, &m);
        prop_assert_eq!(delta(&inst, &other, &m), ws.completion_weight(&inst, &other));
    }

    /// delta(M, N) = -delta(N, M).
    #[test]
    fn margin_antisymmetry(
        seed in any::<u64>(),
        n in 2usize..=8,
        mseed in any::<u64>(),
        nseed in any::<u64>(),
    ) {
        let inst = build_instance(seed, n, false);
        let m = random_matching(&inst, mseed);
        let other = random_matching(&inst, nseed);
        prop_assert_eq!(delta(&inst, &m, &other), -delta(&inst, &other, &m));
    }

    /// Every edge is either kept with a label or removed as (-,-); the
    /// labeling is a pure function of its inputs.
    #[test]
    fn labels_partition_edges(
        seed in any::<u64>(),
        n in 2usize..=8,
        mseed in any::<u64>(),
    ) {
        let inst = build_instance(seed, n, false);
        let m = random_matching(&inst, mseed);
        let lg = label_edges(&inst, &m);
        let kept = lg.kept_edges(&inst).count();
        let removed = lg.removed_edges(&inst).count();
        prop_assert_eq!(kept + removed, inst.edges().len());
        for (u, v, label) in lg.kept_edges(&inst) {
            prop_assert_eq!(label == EdgeLabel::Matched, m.contains(u, v));
        }
        let again = label_edges(&inst, &m);
        prop_assert_eq!(lg.labels, again.labels);
    }

    /// Instance text output parses back to the same canonical text.
    #[test]
    fn instance_text_roundtrip(
        seed in any::<u64>(),
        n in 0usize..=8,
        bipartite in any::<bool>(),
    ) {
        let inst = build_instance(seed, n, bipartite);
        let text = write_instance(&inst);
        let reparsed = parse_instance(&text).unwrap();
        prop_assert_eq!(write_instance(&reparsed), text);
    }
}

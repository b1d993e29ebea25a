//! Cross-module invariants on the seeded random corpus: facts that tie one
//! algorithm to an independent route through another.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use popmatch::gadgets::{build_gadget, parse_cnf, GadgetVariant};
use popmatch::instance::{Instance, InstanceKind, Matching, Side};
use popmatch::labeling::delta;
use popmatch::oracle::{self, OracleBudget};
use popmatch::stable::{enumerate_stable, gale_shapley, irving, is_stable};
use popmatch::treewidth::{is_locally_popular, perturb_costs};
use popmatch::verify::{is_popular_structural, is_strongly_dominant};
use popmatch::{rat, Rat};

fn random_instance(rng: &mut StdRng, n: usize, bipartite: bool, p: f64) -> Instance {
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
            if rng.random_bool(p) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    let nodes: Vec<(String, Option<Side>)> = (0..n).map(|u| (format!("v{u}"), sides[u])).collect();
    let mut prefs = BTreeMap::new();
    for u in 0..n {
        let mut list: Vec<String> = adj[u].iter().map(|&v| format!("v{v}")).collect();
        list.shuffle(rng);
        prefs.insert(format!("v{u}"), list);
    }
    Instance::new(kind, nodes, prefs, Vec::new()).unwrap()
}

/// Stable matchings all cover the same node set, include both side-optimal
/// matchings, and are popular.
#[test]
fn stable_node_invariance_and_popularity() {
    let mut rng = StdRng::seed_from_u64(31);
    for round in 0..60 {
        let inst = random_instance(&mut rng, 4 + round % 5, true, 0.6);
        let all = enumerate_stable(&inst).unwrap();
        assert!(!all.is_empty());
        let a_opt = gale_shapley(&inst, Side::A).unwrap();
        let b_opt = gale_shapley(&inst, Side::B).unwrap();
        assert!(all.contains(&a_opt));
        assert!(all.contains(&b_opt));
        let matched0: Vec<bool> = (0..inst.len()).map(|u| all[0].is_matched(u)).collect();
        for m in &all {
            assert!(is_stable(&inst, m));
            assert!(
                is_popular_structural(&inst, m).verdict,
                "stable implies popular"
            );
            let matched: Vec<bool> = (0..inst.len()).map(|u| m.is_matched(u)).collect();
            assert_eq!(matched, matched0, "stable matchings cover the same nodes");
        }
        // Cross-check completeness against the oracle's no-blocking filter.
        let cls = oracle::classify(&inst, &OracleBudget::default()).unwrap();
        let oracle_stable: Vec<&Matching> = cls
            .matchings
            .iter()
            .zip(&cls.stable)
            .filter(|(_, &s)| s)
            .map(|(m, _)| m)
            .collect();
        assert_eq!(
            oracle_stable.len(),
            all.len(),
            "break-marriage finds every stable matching"
        );
    }
}

/// Irving's verdict matches brute-force blocking-edge enumeration, and its
/// output is stable.
#[test]
fn irving_matches_oracle_existence() {
    let mut rng = StdRng::seed_from_u64(32);
    for round in 0..120 {
        let inst = random_instance(&mut rng, 4 + round % 5, false, [0.4, 0.65, 0.9][round % 3]);
        let cls = oracle::classify(&inst, &OracleBudget::default()).unwrap();
        let oracle_has = cls.stable.iter().any(|&s| s);
        match irving(&inst) {
            Some(m) => {
                assert!(is_stable(&inst, &m), "irving output has a blocking edge");
                assert!(oracle_has);
            }
            None => assert!(!oracle_has, "irving missed a stable matching"),
        }
    }
}

/// The 2-SAT recognizer agrees with exhaustive partition search on every
/// matching, bipartite and roommates alike.
#[test]
fn two_sat_matches_partition_search() {
    let mut rng = StdRng::seed_from_u64(33);
    for round in 0..40 {
        let inst = random_instance(&mut rng, 4 + round % 4, round % 2 == 0, 0.6);
        let cls = oracle::classify(&inst, &OracleBudget::default()).unwrap();
        for (i, m) in cls.matchings.iter().enumerate() {
            assert_eq!(
                is_strongly_dominant(&inst, m).is_some(),
                cls.strongly_dominant[i],
                "2-SAT and exhaustive partition search disagree"
            );
        }
    }
}

/// Restricting a locally popular matching to a nested separator pair stays
/// locally popular.
#[test]
fn local_popularity_restriction_monotone() {
    let mut rng = StdRng::seed_from_u64(34);
    let mut trials = 0;
    while trials < 200 {
        let n = 5 + (trials % 6);
        let inst = random_instance(&mut rng, n, false, 0.5);
        // Outer separator and component union.
        let s_outer: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.25)).collect();
        let comp = components_without(&inst, &s_outer);
        let x_outer: Vec<usize> = pick_components(&mut rng, &inst, &comp, &s_outer, 0.7);
        // Inner: grow the separator, keep components inside the outer side.
        let mut s_inner = s_outer.clone();
        for &u in &x_outer {
            if rng.random_bool(0.3) {
                s_inner.push(u);
            }
        }
        let comp_inner = components_without(&inst, &s_inner);
        let x_inner: Vec<usize> = pick_components(&mut rng, &inst, &comp_inner, &s_inner, 1.0)
            .into_iter()
            .filter(|u| x_outer.contains(u))
            .collect();

        // Random matching touching the outer region only.
        let keep: Vec<bool> = {
            let mut k = vec![false; n];
            for &u in s_outer.iter().chain(&x_outer) {
                k[u] = true;
            }
            k
        };
        let mut edges: Vec<(usize, usize)> = inst
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| keep[u] || keep[v])
            .collect();
        edges.shuffle(&mut rng);
        let mut used = vec![false; n];
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if !used[u] && !used[v] && rng.random_bool(0.5) {
                used[u] = true;
                used[v] = true;
                pairs.push((u, v));
            }
        }
        let m_outer = Matching::new(&inst, pairs).unwrap();
        let Ok(cert) = is_locally_popular(&inst, &s_outer, &x_outer, &m_outer) else {
            continue;
        };
        if !cert.verdict {
            continue;
        }
        // Restriction to the inner region.
        let keep_inner: Vec<bool> = {
            let mut k = vec![false; n];
            for &u in s_inner.iter().chain(&x_inner) {
                k[u] = true;
            }
            k
        };
        let restricted: Vec<(usize, usize)> = m_outer
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| keep_inner[u] || keep_inner[v])
            .collect();
        let m_inner = Matching::new(&inst, restricted).unwrap();
        let inner_cert = is_locally_popular(&inst, &s_inner, &x_inner, &m_inner).unwrap();
        assert!(
            inner_cert.verdict,
            "restriction of a locally popular matching stays locally popular"
        );
        trials += 1;
    }
}

fn components_without(inst: &Instance, s: &[usize]) -> Vec<usize> {
    let n = inst.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for u in 0..n {
        if s.contains(&u) || comp[u] != usize::MAX {
            continue;
        }
        let mut stack = vec![u];
        comp[u] = next;
        while let Some(a) = stack.pop() {
            for &b in inst.prefs(a) {
                if !s.contains(&b) && comp[b] == usize::MAX {
                    comp[b] = next;
                    stack.push(b);
                }
            }
        }
        next += 1;
    }
    comp
}

fn pick_components(
    rng: &mut StdRng,
    inst: &Instance,
    comp: &[usize],
    s: &[usize],
    keep_prob: f64,
) -> Vec<usize> {
    let max = comp
        .iter()
        .filter(|&&c| c != usize::MAX)
        .max()
        .copied()
        .unwrap_or(0);
    let chosen: Vec<bool> = (0..=max).map(|_| rng.random_bool(keep_prob)).collect();
    (0..inst.len())
        .filter(|&u| !s.contains(&u) && comp[u] != usize::MAX && chosen[comp[u]])
        .collect()
}

/// A perturbed-cost argmin over all matchings is an argmin of the original
/// costs, and perturbed costs are pairwise distinct per matching.
#[test]
fn perturbation_preserves_argmin() {
    let mut rng = StdRng::seed_from_u64(35);
    for round in 0..60 {
        let base = random_instance(&mut rng, 4 + round % 4, false, 0.6);
        let costs: Vec<Rat> = (0..base.edges().len())
            .map(|_| rat(rng.random_range(-6i64..=6), rng.random_range(1i64..=3)))
            .collect();
        let inst = base.with_costs(costs);
        let pert = perturb_costs(&inst);
        let matchings = oracle::enumerate_matchings(&inst, &OracleBudget::default()).unwrap();
        let original_min = matchings
            .iter()
            .map(|m| inst.matching_cost(m))
            .min()
            .unwrap();
        let mut perturbed: Vec<(Rat, &Matching)> = matchings
            .iter()
            .map(|m| (pert.matching_cost(m), m))
            .collect();
        perturbed.sort_by(|a, b| a.0.cmp(&b.0));
        for w in perturbed.windows(2) {
            assert_ne!(w[0].0, w[1].0, "perturbed matching costs must be distinct");
        }
        let winner = perturbed.first().unwrap().1;
        assert_eq!(
            inst.matching_cost(winner),
            original_min,
            "perturbed argmin stays optimal"
        );
    }
}

/// Vote margins certify the structural verdicts on the gadget instances the
/// decoding precondition relies on: a matching that covers everything except
/// the two tail nodes beats no larger matching strictly and loses to none.
#[test]
fn forced_forbidden_fixture_regimes() {
    let phi = parse_cnf("p cnf 3 1\n1 2 3 0\n").unwrap();
    let g = build_gadget(&phi, GadgetVariant::G).unwrap();
    let g0 = build_gadget(&phi, GadgetVariant::G0).unwrap();
    // The six hardness regimes instantiate on these concrete elements.
    let edge = |inst: &Instance, a: &str, b: &str| {
        let u = inst.node(a).unwrap();
        let v = inst.node(b).unwrap();
        assert!(inst.is_edge(u, v), "({a},{b}) must be an edge");
        (u, v)
    };
    // |U0| = |U1| = 1: forbid z, force s1_0 (in G).
    assert!(g.node("z").is_some() && g.node("s1_0").is_some());
    // |U1| = 1 with one forced or forbidden edge (in G).
    edge(&g, "a0", "b0");
    edge(&g, "a0", "z");
    // |E1| = 2 and |E0| = 2 and mixed, on G0's extra gadget.
    edge(&g0, "a0", "b0");
    edge(&g0, "x0", "y'0");
    edge(&g0, "a0", "z");
    edge(&g0, "x0", "y0");
    // Sides follow the published split: a0, z' on one side, b0, z on the other.
    assert_eq!(g.side(g.node("a0").unwrap()), Some(Side::A));
    assert_eq!(g.side(g.node("z'").unwrap()), Some(Side::A));
    assert_eq!(g.side(g.node("b0").unwrap()), Some(Side::B));
    assert_eq!(g.side(g.node("z").unwrap()), Some(Side::B));

    // Desk-scale sanity for the pmffe operation itself on the 4-node gadget.
    let d = popmatch::io::parse_instance(
        "popmatch v1 roommates\nnode d0\nnode d1\nnode d2\nnode d3\n\
         pref d0: d1 d2 d3\npref d1: d2 d3 d0\npref d2: d3 d1 d0\npref d3: d1 d2 d0\n",
    )
    .unwrap();
    let budget = OracleBudget::default();
    let d0 = d.node("d0").unwrap();
    let d1 = d.node("d1").unwrap();
    let d2 = d.node("d2").unwrap();
    let d3 = d.node("d3").unwrap();
    // Forcing node d0 and forbidding edge (d0, d1) leaves only the other
    // popular matching.
    let m = oracle::pmffe(&d, &[(d0, d1)], &[], &[], &[d0], &budget)
        .unwrap()
        .unwrap();
    assert!(m.contains(d0, d2) && m.contains(d1, d3));
    // Margins certify it: it ties the other popular matching and beats the rest.
    let other = Matching::new(&d, vec![(d0, d1), (d2, d3)]).unwrap();
    assert_eq!(delta(&d, &m, &other), 0);
}

/// Known popular matchings of a generated hardness instance keep every
/// four-column gadget, every six-node gadget row, every anchor gadget, and
/// the four hub nodes inside single connected components of their union.
#[test]
fn gadget_nodes_share_popular_subgraph_components() {
    use popmatch::gadgets::{assignment_to_matching, exemplar_matchings, one_in_three_assignments};
    use popmatch::verify::popular_subgraph;

    let phi = parse_cnf("p cnf 3 1\n1 2 3 0\n").unwrap();
    let (inst, ex) = exemplar_matchings(&phi).unwrap();
    let mut known = vec![ex.s, ex.s_prime, ex.m_star];
    for a in one_in_three_assignments(&phi) {
        known.push(assignment_to_matching(&phi, &a).unwrap().0);
    }
    for m in &known {
        assert!(is_popular_structural(&inst, m).verdict);
    }
    let (_, components) = popular_subgraph(&inst, &known);
    let comp_of = |name: &str| {
        let u = inst.node(name).unwrap();
        components.iter().position(|c| c.contains(&u)).unwrap()
    };
    let mut grouped: Vec<Vec<String>> = vec![["a0", "b0", "z", "z'"]
        .iter()
        .map(|s| s.to_string())
        .collect()];
    for r in 1..=3 {
        grouped.push(vec![
            format!("x{r}"),
            format!("x'{r}"),
            format!("y{r}"),
            format!("y'{r}"),
        ]);
    }
    for g in 0..3 {
        let (t1, t2) = (2 * g + 1, 2 * g + 2);
        grouped.push(vec![
            format!("a1_{t1}"),
            format!("b1_{t1}"),
            format!("a1_{t2}"),
            format!("b1_{t2}"),
        ]);
        grouped.push(
            (3 * g..=3 * g + 2)
                .flat_map(|t| [format!("p1_{t}"), format!("q1_{t}")])
                .collect(),
        );
    }
    grouped.push(
        (0..=3)
            .flat_map(|t| [format!("s1_{t}"), format!("t1_{t}")])
            .collect(),
    );
    for group in grouped {
        let c0 = comp_of(&group[0]);
        for name in &group[1..] {
            assert_eq!(
                comp_of(name),
                c0,
                "{name} must share a component with {}",
                group[0]
            );
        }
    }
}

/// Exhaustive check of Irving's algorithm over every complete 4-node
/// roommates instance (all 6^4 preference profiles): the existence verdict
/// and stability of the output match brute force everywhere.
#[test]
fn irving_exhaustive_on_complete_k4() {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let budget = OracleBudget::default();
    let mut solvable = 0usize;
    let mut unsolvable = 0usize;
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                for d in 0..6 {
                    let choice = [a, b, c, d];
                    let nodes: Vec<(String, Option<Side>)> =
                        (0..4).map(|u| (format!("k{u}"), None)).collect();
                    let mut prefs = BTreeMap::new();
                    for u in 0..4 {
                        let others: Vec<usize> = (0..4).filter(|&v| v != u).collect();
                        let list: Vec<String> =
                            perms[choice[u]].iter().map(|&i| format!("k{}", others[i])).collect();
                        prefs.insert(format!("k{u}"), list);
                    }
                    let inst =
                        Instance::new(InstanceKind::Roommates, nodes, prefs, Vec::new()).unwrap();
                    let cls = oracle::classify(&inst, &budget).unwrap();
                    let oracle_has = cls.stable.iter().any(|&s| s);
                    match irving(&inst) {
                        Some(m) => {
                            assert!(is_stable(&inst, &m));
                            assert!(oracle_has);
                            solvable += 1;
                        }
                        None => {
                            assert!(!oracle_has, "irving missed a stable matching on {choice:?}");
                            unsolvable += 1;
                        }
                    }
                }
            }
        }
    }
    assert_eq!(solvable + unsolvable, 1296);
    assert!(unsolvable > 0, "some complete K4 profiles have no stable matching");
}

/// Parallel oracle classification merges deterministically.
#[test]
fn oracle_jobs_deterministic() {
    let mut rng = StdRng::seed_from_u64(36);
    for round in 0..10 {
        let inst = random_instance(&mut rng, 6 + round % 3, round % 2 == 0, 0.7);
        let budget = OracleBudget::default();
        let serial = oracle::classify(&inst, &budget).unwrap();
        let parallel = oracle::classify_with_jobs(&inst, &budget, 4).unwrap();
        assert_eq!(serial.matchings, parallel.matchings);
        assert_eq!(serial.stable, parallel.stable);
        assert_eq!(serial.popular, parallel.popular);
        assert_eq!(serial.dominant, parallel.dominant);
        assert_eq!(serial.strongly_dominant, parallel.strongly_dominant);
    }
}

/// Every popular matching covers every stable node (a node matched in some,
/// equivalently every, stable matching).
#[test]
fn popular_matchings_cover_stable_nodes() {
    let mut rng = StdRng::seed_from_u64(37);
    for round in 0..60 {
        let inst = random_instance(&mut rng, 4 + round % 5, true, 0.6);
        let stable_matched: Vec<bool> = {
            let s = gale_shapley(&inst, Side::A).unwrap();
            (0..inst.len()).map(|u| s.is_matched(u)).collect()
        };
        let cls = oracle::classify(&inst, &OracleBudget::default()).unwrap();
        for (i, m) in cls.matchings.iter().enumerate() {
            if !cls.popular[i] {
                continue;
            }
            for u in 0..inst.len() {
                if stable_matched[u] {
                    assert!(m.is_matched(u), "popular matching leaves stable node unmatched");
                }
            }
        }
    }
}

//! Acceptance suite: every check here is an exit criterion and prints one
//! pass line. Ground truth comes from exhaustive vote-count oracles on a
//! seeded random corpus of small instances.

use std::collections::BTreeMap;
use std::time::Instant;

use num::Zero;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use popmatch::dominant::{approx_max_weight_popular, popular_edge_sets, strongly_dominant};
use popmatch::gadgets::{
    assignment_to_matching, build_gadget, exemplar_matchings, matching_to_assignment,
    one_in_three_assignments, parse_cnf, GadgetVariant,
};
use popmatch::instance::{Instance, InstanceKind, Matching, Side};
use popmatch::io::parse_instance;
use popmatch::labeling::{delta, label_edges};
use popmatch::oracle::{self, OracleBudget};
use popmatch::stable::is_stable;
use popmatch::structure::{EdgeKind, LocalView};
use popmatch::treewidth::{
    decompose_path, find_tree_decomposition, juxtapose, make_dichotomic,
    min_cost_popular_tw_checked, SegmentLabel,
};
use popmatch::verify::{
    find_unit_witness, find_witness, is_dominant_structural, is_popular_structural,
    is_strongly_dominant, verify_witness,
};
use popmatch::{rat, EdgeLabel, Rat};

const ONE_CLAUSE: &str = "p cnf 3 1\n1 2 3 0\n";
const TWO_CLAUSE: &str = "p cnf 4 2\n1 2 3 0\n2 3 4 0\n";

/// Deterministic random instance: strict mutual lists over a random edge set.
fn random_instance(rng: &mut StdRng, n: usize, bipartite: bool, edge_prob: f64) -> Instance {
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
            if rng.random_bool(edge_prob) {
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
    Instance::new(kind, nodes, prefs, Vec::new()).expect("generator emits valid instances")
}

fn corpus(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let n = 4 + (i % 5); // 4..=8
        let bipartite = i % 2 == 0;
        let p = [0.35, 0.55, 0.8][i % 3];
        out.push(random_instance(&mut rng, n, bipartite, p));
    }
    out
}

fn oracle_popular_flags(inst: &Instance, matchings: &[Matching]) -> Vec<bool> {
    (0..matchings.len())
        .map(|i| (0..matchings.len()).all(|j| delta(inst, &matchings[i], &matchings[j]) >= 0))
        .collect()
}

#[test]
fn criterion_01_structural_popularity_matches_oracle() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let instances = corpus(11, 200);
    let mut checked = 0usize;
    for inst in &instances {
        let matchings = oracle::enumerate_matchings(inst, &budget).unwrap();
        let popular = oracle_popular_flags(inst, &matchings);
        for (m, &truth) in matchings.iter().zip(&popular) {
            let got = is_popular_structural(inst, m).verdict;
            assert_eq!(got, truth, "popularity mismatch on {m:?}");
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 1 took {elapsed:?}");
    println!(
        "criterion 1: PASS structural popularity == oracle on {} matchings over {} instances ({elapsed:?})",
        checked,
        instances.len()
    );
}

#[test]
fn criterion_02_dominance_characterization() {
    let budget = OracleBudget::default();
    let instances = corpus(11, 200);
    let mut findings: Vec<String> = Vec::new();
    let mut bipartite_mismatch = 0usize;
    let mut checked = 0usize;
    for (idx, inst) in instances.iter().enumerate() {
        let matchings = oracle::enumerate_matchings(inst, &budget).unwrap();
        let popular = oracle_popular_flags(inst, &matchings);
        for (i, m) in matchings.iter().enumerate() {
            if !popular[i] {
                continue;
            }
            let oracle_dominant = (0..matchings.len())
                .all(|j| matchings[j].len() <= m.len() || delta(inst, m, &matchings[j]) > 0);
            let structural = is_dominant_structural(inst, m).unwrap().verdict;
            checked += 1;
            if structural != oracle_dominant {
                if inst.is_bipartite() {
                    bipartite_mismatch += 1;
                } else {
                    findings.push(format!(
                        "finding: roommates dominance disagreement on corpus instance {idx}: \
                         structural={structural} oracle={oracle_dominant} matching={:?}",
                        m.edge_names(inst)
                    ));
                }
            }
        }
    }
    for f in &findings {
        println!("{f}");
    }
    assert_eq!(
        bipartite_mismatch, 0,
        "bipartite dominance must match the oracle exactly"
    );
    println!(
        "criterion 2: PASS dominance characterization on {checked} popular matchings; \
         {} roommates findings, 0 bipartite mismatches",
        findings.len()
    );
}

#[test]
fn criterion_03_strongly_dominant_algorithm() {
    let budget = OracleBudget::default();
    let instances = corpus(11, 200);
    for inst in &instances {
        let cls = oracle::classify(inst, &budget).unwrap();
        let oracle_has = cls.strongly_dominant.iter().any(|&b| b);
        match strongly_dominant(inst).unwrap() {
            Some((m, w)) => {
                assert!(oracle_has, "algorithm found one, oracle found none");
                assert!(verify_witness(inst, &m, &w));
                assert!(w.is_unit());
                for u in 0..inst.len() {
                    assert_eq!(w.alpha[u].is_zero(), !m.is_matched(u), "witness shape");
                }
            }
            None => {
                assert!(!oracle_has, "oracle found one, algorithm found none");
                assert!(!inst.is_bipartite(), "bipartite instances always have one");
            }
        }
    }
    // Fixtures: the 4-node no-stable instance and its non-strongly-dominant twin.
    let d = parse_instance(
        "popmatch v1 roommates\nnode d0\nnode d1\nnode d2\nnode d3\n\
         pref d0: d1 d2 d3\npref d1: d2 d3 d0\npref d2: d3 d1 d0\npref d3: d1 d2 d0\n",
    )
    .unwrap();
    let (m, _) = strongly_dominant(&d).unwrap().expect("exists");
    let names = m.edge_names(&d);
    assert!(
        names == vec![("d0", "d1"), ("d2", "d3")] || names == vec![("d0", "d2"), ("d1", "d3")],
        "one of the two golden matchings"
    );
    let abcd = parse_instance(
        "popmatch v1 roommates\nnode a\nnode b\nnode c\nnode d\n\
         pref a: b c d\npref b: a c\npref c: a b\npref d: a\n",
    )
    .unwrap();
    assert!(strongly_dominant(&abcd).unwrap().is_none());
    println!(
        "criterion 3: PASS strongly dominant algorithm agrees with the oracle on 200 instances"
    );
}

#[test]
fn criterion_04_bipartite_dominant_equals_strongly_dominant() {
    let budget = OracleBudget::default();
    let instances = corpus(11, 200);
    let mut checked = 0usize;
    for inst in instances.iter().filter(|i| i.is_bipartite()) {
        let cls = oracle::classify(inst, &budget).unwrap();
        for (i, m) in cls.matchings.iter().enumerate() {
            let accepted = is_strongly_dominant(inst, m).is_some();
            assert_eq!(
                cls.dominant[i], accepted,
                "bipartite dominant and strongly dominant sets must coincide"
            );
            checked += 1;
        }
    }
    println!("criterion 4: PASS dominant == strongly dominant on {checked} bipartite matchings");
}

#[test]
fn criterion_05_witness_duality() {
    let budget = OracleBudget::default();
    let instances = corpus(11, 200);
    let mut lp_checked = 0usize;
    let mut unit_checked = 0usize;
    for inst in instances.iter().filter(|i| i.is_bipartite()) {
        let matchings = oracle::enumerate_matchings(inst, &budget).unwrap();
        let popular = oracle_popular_flags(inst, &matchings);
        for (m, &truth) in matchings.iter().zip(&popular) {
            let witness = find_witness(inst, m).unwrap();
            assert_eq!(witness.is_some(), truth, "witness exists iff popular");
            if let Some(w) = &witness {
                assert!(verify_witness(inst, m, w));
            }
            lp_checked += 1;
            if truth {
                let unit =
                    find_unit_witness(inst, m).expect("popular matchings have unit witnesses");
                assert!(unit.is_unit());
                assert!(verify_witness(inst, m, &unit));
                unit_checked += 1;
            }
        }
    }
    println!(
        "criterion 5: PASS witness duality on {lp_checked} matchings ({unit_checked} unit witnesses)"
    );
}

#[test]
fn criterion_06_gadget_forward_construction() {
    let start = Instant::now();
    for cnf in [ONE_CLAUSE, TWO_CLAUSE] {
        let phi = parse_cnf(cnf).unwrap();
        let inst = build_gadget(&phi, GadgetVariant::G).unwrap();
        let z = inst.node("z").unwrap();
        let zp = inst.node("z'").unwrap();
        let assignments = one_in_three_assignments(&phi);
        assert_eq!(assignments.len(), 3);
        for a in &assignments {
            let (m, w) = assignment_to_matching(&phi, a).unwrap();
            assert!(is_popular_structural(&inst, &m).verdict, "(a) popular");
            assert!(verify_witness(&inst, &m, &w), "(b) witness verifies");
            let lg = label_edges(&inst, &m);
            assert!(
                lg.labels.contains(&EdgeLabel::PlusPlus),
                "(c) has a blocking edge"
            );
            assert!(
                !is_dominant_structural(&inst, &m).unwrap().verdict,
                "(d) not dominant"
            );
            for u in 0..inst.len() {
                assert_eq!(
                    m.is_matched(u),
                    u != z && u != zp,
                    "(e) matches all but z, z'"
                );
            }
            let back = matching_to_assignment(&phi, &inst, &m).unwrap();
            assert_eq!(&back, a, "(f) round trip");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "criterion 6 took {elapsed:?}");
    println!("criterion 6: PASS forward construction on 1- and 2-clause formulas ({elapsed:?})");
}

#[test]
fn criterion_07_exemplar_matchings() {
    for cnf in [ONE_CLAUSE, TWO_CLAUSE] {
        let phi = parse_cnf(cnf).unwrap();
        let (inst, ex) = exemplar_matchings(&phi).unwrap();
        assert!(is_stable(&inst, &ex.s), "S stable");
        assert!(is_stable(&inst, &ex.s_prime), "S' stable");
        assert_eq!(ex.m_star.len() * 2, inst.len(), "M* perfect");
        assert!(
            is_dominant_structural(&inst, &ex.m_star).unwrap().verdict,
            "M* dominant"
        );
        assert!(
            verify_witness(&inst, &ex.m_star, &ex.m_star_witness),
            "M* witness"
        );
        // The backtracking unit-witness search also certifies M*, pinning the
        // forced values on the four tail nodes.
        let unit = find_unit_witness(&inst, &ex.m_star).unwrap();
        assert!(verify_witness(&inst, &ex.m_star, &unit));
        assert!(
            unit.alpha.iter().all(|a| !a.is_zero()),
            "perfect matching: all entries +1 or -1"
        );
        for (name, v) in [("a0", 1), ("b0", 1), ("z", -1), ("z'", -1)] {
            assert_eq!(unit.alpha[inst.node(name).unwrap()], rat(v, 1));
        }
    }
    println!("criterion 7: PASS exemplars on 1- and 2-clause formulas");
}

/// Structured instances for the treewidth criterion: paths, cycles, trees,
/// and sparse random graphs with random rational costs.
fn structured_instance(rng: &mut StdRng, shape: usize, n: usize) -> Instance {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    match shape {
        0 => edges.extend((0..n - 1).map(|i| (i, i + 1))),
        1 => {
            edges.extend((0..n - 1).map(|i| (i, i + 1)));
            edges.push((n - 1, 0));
        }
        2 => {
            for v in 1..n {
                let parent = rng.random_range(0..v);
                edges.push((parent, v));
            }
        }
        _ => {
            let target = n + rng.random_range(0..3);
            let mut tries = 0;
            while edges.len() < target && tries < 100 {
                tries += 1;
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u != v && !edges.contains(&(u.min(v), u.max(v))) {
                    edges.push((u.min(v), u.max(v)));
                }
            }
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let nodes: Vec<(String, Option<Side>)> = (0..n).map(|u| (format!("v{u}"), None)).collect();
    let mut prefs = BTreeMap::new();
    for u in 0..n {
        let mut list: Vec<String> = adj[u].iter().map(|&v| format!("v{v}")).collect();
        list.sort();
        list.shuffle(rng);
        prefs.insert(format!("v{u}"), list);
    }
    let mut costs = Vec::new();
    for &(u, v) in &edges {
        let num = rng.random_range(-10i64..=10);
        let den = rng.random_range(1i64..=4);
        costs.push(((format!("v{u}"), format!("v{v}")), rat(num, den)));
    }
    Instance::new(InstanceKind::Roommates, nodes, prefs, costs).unwrap()
}

#[test]
fn criterion_08_treewidth_dp_matches_oracle() {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let mut rng = StdRng::seed_from_u64(88);
    let mut solved = 0usize;
    let mut none_cases = 0usize;
    while solved < 100 {
        let shape = solved % 4;
        let n = 4 + (solved % 7); // 4..=10
        let inst = structured_instance(&mut rng, shape, n);
        let Ok(td) = find_tree_decomposition(&inst, 3) else {
            continue;
        };
        let dtd = make_dichotomic(&td);
        let got = min_cost_popular_tw_checked(&inst, &dtd, n <= 8).unwrap();
        let want = oracle::optimize(&inst, oracle::Objective::MinCostPopular, &budget).unwrap();
        match (&got, &want) {
            (None, None) => none_cases += 1,
            (Some((gm, gc)), Some((wm, wc))) => {
                assert_eq!(gm, wm, "matching differs from oracle optimum");
                assert_eq!(gc, wc, "cost differs from oracle optimum");
            }
            _ => panic!("existence disagrees with oracle: got {got:?}, want {want:?}"),
        }
        solved += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "criterion 8 took {elapsed:?}");
    println!(
        "criterion 8: PASS treewidth DP == oracle on 100 instances ({none_cases} without a popular matching, {elapsed:?})"
    );
}

#[test]
fn criterion_09_half_approximation() {
    let budget = OracleBudget::default();
    let mut rng = StdRng::seed_from_u64(99);
    let base = corpus(11, 200);
    let mut checked = 0usize;
    for inst in base.iter().filter(|i| i.is_bipartite()) {
        // Random nonnegative costs.
        let costs: Vec<Rat> = (0..inst.edges().len())
            .map(|_| rat(rng.random_range(0i64..=10), 1))
            .collect();
        let inst = inst.with_costs(costs);
        let approx = approx_max_weight_popular(&inst, &budget).unwrap();
        assert!(
            is_popular_structural(&inst, &approx).verdict,
            "approx output is popular"
        );
        let (_, best) = oracle::optimize(&inst, oracle::Objective::MaxWeightPopular, &budget)
            .unwrap()
            .expect("bipartite instances have popular matchings");
        let approx_cost = inst.matching_cost(&approx);
        assert!(
            approx_cost.clone() * rat(2, 1) >= best,
            "cost {approx_cost} below half of optimum {best}"
        );
        checked += 1;
    }

    // Tightness fixture: ratio exactly 1/2.
    let fixture = parse_instance(include_str!("fixtures/ratio_half.inst")).unwrap();
    let approx = approx_max_weight_popular(&fixture, &budget).unwrap();
    let approx_cost = fixture.matching_cost(&approx);
    let (opt_m, opt_cost) =
        oracle::optimize(&fixture, oracle::Objective::MaxWeightPopular, &budget)
            .unwrap()
            .unwrap();
    assert_eq!(opt_cost, rat(2, 1));
    assert_eq!(approx_cost, rat(1, 1), "fixture ratio is 1/2 < 0.6");
    assert!(!is_stable(&fixture, &opt_m));
    assert!(!is_dominant_structural(&fixture, &opt_m).unwrap().verdict);
    println!(
        "criterion 9: PASS 1/2-approximation bound on {checked} instances; fixture ratio = 1/2"
    );
}

#[test]
fn criterion_10_popular_edge_set_identities() {
    let budget = OracleBudget::default();
    let instances = corpus(11, 200);
    let mut checked = 0usize;
    for inst in instances.iter().filter(|i| i.is_bipartite()) {
        let cls = oracle::classify(inst, &budget).unwrap();
        let popular: Vec<Matching> = cls
            .matchings
            .iter()
            .zip(&cls.popular)
            .filter(|(_, &p)| p)
            .map(|(m, _)| m.clone())
            .collect();
        assert!(
            !popular.is_empty(),
            "popular matchings always exist in bipartite instances"
        );
        // popular_edge_sets returns an error if either union identity fails.
        popular_edge_sets(inst, &popular).expect("E_p = E_s u E_d and complement identity");
        checked += 1;
    }
    println!("criterion 10: PASS popular edge set identities on {checked} bipartite instances");
}

/// Enumerates alternating simple paths of `G_M` (both starting edge kinds).
fn alternating_paths(view: &LocalView, limit: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn extend(
        view: &LocalView,
        cur: usize,
        came_matched: bool,
        nodes: &mut Vec<usize>,
        on: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if nodes.len() >= 2 {
            out.push(nodes.clone());
        }
        let nexts: Vec<(usize, EdgeKind)> = if came_matched {
            view.adj[cur]
                .iter()
                .copied()
                .filter(|&(w, k)| k != EdgeKind::Matched && !on[w])
                .collect()
        } else {
            view.matched[cur]
                .filter(|&w| !on[w])
                .map(|w| vec![(w, EdgeKind::Matched)])
                .unwrap_or_default()
        };
        for (w, k) in nexts {
            nodes.push(w);
            on[w] = true;
            extend(view, w, k == EdgeKind::Matched, nodes, on, out, limit);
            on[w] = false;
            nodes.pop();
        }
    }
    for s in 0..view.len() {
        for &(w, k) in view.adj[s].to_vec().iter() {
            let mut nodes = vec![s, w];
            let mut on = vec![false; view.len()];
            on[s] = true;
            on[w] = true;
            extend(
                view,
                w,
                k == EdgeKind::Matched,
                &mut nodes,
                &mut on,
                &mut out,
                limit,
            );
            if out.len() >= limit {
                return out;
            }
            out.push(vec![s, w]);
        }
    }
    out
}

#[test]
fn criterion_11_path_decomposition_juxtaposition() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut total_paths = 0usize;
    let mut instance_round = 0usize;
    while total_paths < 1000 {
        instance_round += 1;
        let inst = random_instance(
            &mut rng,
            4 + instance_round % 7,
            instance_round.is_multiple_of(2),
            0.6,
        );
        // Random greedy matching.
        let mut edges: Vec<(usize, usize)> = inst.edges().to_vec();
        edges.shuffle(&mut rng);
        let mut used = vec![false; inst.len()];
        let mut pairs = Vec::new();
        for (u, v) in edges {
            if !used[u] && !used[v] && rng.random_bool(0.7) {
                used[u] = true;
                used[v] = true;
                pairs.push((u, v));
            }
        }
        let m = Matching::new(&inst, pairs).unwrap();
        let view = LocalView::of_matching(&inst, &m);

        // Random separator; X = a random union of components of G \ S.
        let n = inst.len();
        let s_set: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
        let mut comp = vec![usize::MAX; n];
        let mut next_comp = 0;
        for u in 0..n {
            if s_set[u] || comp[u] != usize::MAX {
                continue;
            }
            let mut stack = vec![u];
            comp[u] = next_comp;
            while let Some(a) = stack.pop() {
                for &b in inst.prefs(a) {
                    if !s_set[b] && comp[b] == usize::MAX {
                        comp[b] = next_comp;
                        stack.push(b);
                    }
                }
            }
            next_comp += 1;
        }
        let chosen: Vec<bool> = (0..next_comp).map(|_| rng.random_bool(0.6)).collect();
        let x_set: Vec<bool> = (0..n)
            .map(|u| !s_set[u] && comp[u] != usize::MAX && chosen[comp[u]])
            .collect();

        for path in alternating_paths(&view, 40) {
            let segs = decompose_path(&path, |v| s_set[v], |v| x_set[v]);
            assert_eq!(
                juxtapose(&segs),
                path,
                "juxtaposition reconstructs the path"
            );
            for seg in &segs {
                if let SegmentLabel::Index(i) = seg.label {
                    if i % 2 == 1 {
                        // Odd pieces are S-paths inside X u S.
                        assert!(seg.nodes.iter().all(|&v| s_set[v] || x_set[v]));
                        let interior = &seg.nodes[1..seg.nodes.len() - 1];
                        assert!(interior.iter().all(|&v| !s_set[v]));
                        assert!(
                            s_set[seg.nodes[0]] || s_set[*seg.nodes.last().unwrap()],
                            "an S-path touches S at an endpoint"
                        );
                    }
                }
            }
            total_paths += 1;
        }
    }
    println!("criterion 11: PASS juxtaposition identity on {total_paths} alternating paths");
}

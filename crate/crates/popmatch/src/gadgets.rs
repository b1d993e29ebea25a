//! Hardness-instance generators and the constructive maps between 1-in-3
//! satisfying assignments and popular matchings.
//!
//! Given a positive 3-CNF formula, [`build_gadget`] materializes the
//! bipartite instance with one variable gadget per variable (level 1) and,
//! per clause, three level-0 gadgets, three level-2 gadgets, and one level-3
//! gadget, tied together by the four nodes `a0, b0, z, z'`. Variants:
//!
//! * `G`: the base bipartite instance;
//! * `G0`: `G` plus one extra variable-style gadget `x0,x'0,y0,y'0` wired to
//!   the level-3 anchors (forced/forbidden reductions);
//! * `GPrime`: `G` with `z` and `z'` merged into one node (roommates);
//! * `H`: `GPrime` plus the 4-node gadget `d0..d3` whose hub `d0` is
//!   adjacent to everything except `z` (odd node count).
//!
//! Where the construction leaves tail order free ("the order among these
//! nodes does not matter"), tails are fixed by (clause index, node name) so
//! builds are byte-reproducible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceKind, Matching, Side};
use crate::verify::Witness;
use crate::Rat;

/// A 3-CNF formula with no negated literals. Variables are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveCnf {
    pub num_vars: usize,
    pub clauses: Vec<[usize; 3]>,
}

/// A total true/false assignment, 1-based like the formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn truth(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    /// Index (0..3) of the unique true variable of `clause`, or an error
    /// naming the violating clause.
    fn true_position(&self, clause_idx: usize, clause: &[usize; 3]) -> Result<usize> {
        let trues: Vec<usize> = (0..3).filter(|&i| self.truth(clause[i])).collect();
        match trues[..] {
            [i] => Ok(i),
            _ => Err(Error::Precondition(format!(
                "clause {} has {} true literals, expected exactly one",
                clause_idx + 1,
                trues.len()
            ))),
        }
    }
}

/// Parses a DIMACS-style positive 3-CNF: `p cnf <vars> <clauses>` header,
/// clause lines of three distinct positive literals terminated by `0`,
/// `c`-lines as comments.
pub fn parse_cnf(text: &str) -> Result<PositiveCnf> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let ["cnf", v, c] = toks[..] else {
                return Err(Error::parse(lineno, "expected `p cnf <vars> <clauses>`"));
            };
            let v = v
                .parse()
                .map_err(|_| Error::parse(lineno, "bad variable count"))?;
            let c = c
                .parse()
                .map_err(|_| Error::parse(lineno, "bad clause count"))?;
            header = Some((v, c));
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(Error::parse(lineno, "clause before `p cnf` header"));
        };
        let mut lits = Vec::new();
        for tok in line.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                break;
            }
            if lit < 0 {
                return Err(Error::parse(
                    lineno,
                    format!("negated literal `{lit}` not allowed"),
                ));
            }
            let var = lit as usize;
            if var > num_vars {
                return Err(Error::parse(lineno, format!("variable {var} out of range")));
            }
            lits.push(var);
        }
        let [a, b, c] = lits[..] else {
            return Err(Error::parse(lineno, "clauses must have exactly 3 literals"));
        };
        if a == b || a == c || b == c {
            return Err(Error::parse(lineno, "repeated variable within a clause"));
        }
        clauses.push([a, b, c]);
    }
    let Some((num_vars, num_clauses)) = header else {
        return Err(Error::parse(1, "missing `p cnf` header"));
    };
    if clauses.len() != num_clauses {
        return Err(Error::parse(
            0,
            format!(
                "header declares {num_clauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    Ok(PositiveCnf { num_vars, clauses })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GadgetVariant {
    G,
    G0,
    GPrime,
    H,
}

// Node name helpers. Clause indices are 1-based in names.
fn nx(r: usize) -> String {
    format!("x{r}")
}
fn nxp(r: usize) -> String {
    format!("x'{r}")
}
fn ny(r: usize) -> String {
    format!("y{r}")
}
fn nyp(r: usize) -> String {
    format!("y'{r}")
}
fn na(c: usize, t: usize) -> String {
    format!("a{c}_{t}")
}
fn nb(c: usize, t: usize) -> String {
    format!("b{c}_{t}")
}
fn np(c: usize, t: usize) -> String {
    format!("p{c}_{t}")
}
fn nq(c: usize, t: usize) -> String {
    format!("q{c}_{t}")
}
fn ns(c: usize, t: usize) -> String {
    format!("s{c}_{t}")
}
fn nt(c: usize, t: usize) -> String {
    format!("t{c}_{t}")
}

/// Positions of the outer neighbors per gadget column. Column `g` of the
/// level-0 row connects `a_{2g+1}` to `y'` of position `OUTER_Y[g]` and
/// `b_{2g+1}` to `x'` of position `OUTER_X[g]`; the level-2 row connects
/// `p_{3g+2}` to `y` of `OUTER_Y[g]` and `q_{3g+2}` to `x` of `OUTER_X[g]`.
const OUTER_Y: [usize; 3] = [1, 2, 0];
const OUTER_X: [usize; 3] = [2, 0, 1];

struct Builder {
    nodes: Vec<(String, Option<Side>)>,
    prefs: BTreeMap<String, Vec<String>>,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            nodes: Vec::new(),
            prefs: BTreeMap::new(),
        }
    }

    fn node(&mut self, name: String, side: Side, list: Vec<String>) {
        self.nodes.push((name.clone(), Some(side)));
        self.prefs.insert(name, list);
    }
}

/// Builds the base bipartite instance `G` for the formula.
fn build_g(phi: &PositiveCnf) -> Builder {
    let nv = phi.num_vars;
    let _ids = |f: fn(usize, usize) -> String, c: usize, ts: std::ops::RangeInclusive<usize>| {
        ts.map(move |t| f(c, t)).collect::<Vec<_>>()
    };
    let clauses: Vec<usize> = (1..=phi.clauses.len()).collect();

    let mut b = Builder::new();

    // a0, b0, z, z'.
    b.node("a0".into(), Side::A, vec!["b0".into(), "z".into()]);
    b.node("b0".into(), Side::B, vec!["a0".into(), "z'".into()]);
    {
        let mut zl: Vec<String> = (1..=nv).map(nx).collect();
        for &c in &clauses {
            zl.extend([np(c, 1), np(c, 4), np(c, 7)]);
        }
        zl.push("a0".into());
        for &c in &clauses {
            zl.extend([na(c, 1), na(c, 3), na(c, 5)]);
        }
        b.node("z".into(), Side::B, zl);
        let mut zpl: Vec<String> = (1..=nv).map(ny).collect();
        for &c in &clauses {
            zpl.extend([nq(c, 0), nq(c, 3), nq(c, 6)]);
        }
        zpl.push("b0".into());
        for &c in &clauses {
            zpl.extend([nb(c, 1), nb(c, 3), nb(c, 5)]);
        }
        b.node("z'".into(), Side::A, zpl);
    }

    // Level 1: one gadget per variable.
    for r in 1..=nv {
        let occurrences: Vec<(usize, usize)> = phi
            .clauses
            .iter()
            .enumerate()
            .filter_map(|(ci, cl)| cl.iter().position(|&v| v == r).map(|pos| (ci + 1, pos)))
            .collect();

        let mut x_list = vec![ny(r), nyp(r), "z".into()];
        for &(c, pos) in &occurrences {
            // q-middle node of the gadget column whose OUTER_X is `pos`.
            let g = OUTER_X.iter().position(|&p| p == pos).unwrap();
            x_list.push(nq(c, 3 * g + 2));
        }
        b.node(nx(r), Side::A, x_list);

        let mut xp_list = vec![ny(r), nyp(r)];
        for &c in &clauses {
            if let Some(&(_, pos)) = occurrences.iter().find(|&&(oc, _)| oc == c) {
                let g = OUTER_X.iter().position(|&p| p == pos).unwrap();
                xp_list.push(nb(c, 2 * g + 1));
            }
            xp_list.push(nt(c, 0));
        }
        b.node(nxp(r), Side::A, xp_list);

        let mut y_list = vec![nx(r), nxp(r), "z'".into()];
        for &(c, pos) in &occurrences {
            let g = OUTER_Y.iter().position(|&p| p == pos).unwrap();
            y_list.push(np(c, 3 * g + 2));
        }
        b.node(ny(r), Side::B, y_list);

        let mut yp_list = vec![nx(r), nxp(r)];
        for &c in &clauses {
            if let Some(&(_, pos)) = occurrences.iter().find(|&&(oc, _)| oc == c) {
                let g = OUTER_Y.iter().position(|&p| p == pos).unwrap();
                yp_list.push(na(c, 2 * g + 1));
            }
            yp_list.push(ns(c, 0));
        }
        b.node(nyp(r), Side::B, yp_list);
    }

    for (ci, clause) in phi.clauses.iter().enumerate() {
        let c = ci + 1;

        // Level 0: three 4-node gadgets.
        for g in 0..3 {
            let (t1, t2) = (2 * g + 1, 2 * g + 2);
            let outer_y = nyp(clause[OUTER_Y[g]]);
            let outer_x = nxp(clause[OUTER_X[g]]);
            b.node(
                na(c, t1),
                Side::A,
                vec![nb(c, t1), outer_y, nb(c, t2), "z".into()],
            );
            b.node(
                nb(c, t1),
                Side::B,
                vec![na(c, t2), outer_x, na(c, t1), "z'".into()],
            );
            b.node(na(c, t2), Side::A, vec![nb(c, t2), nb(c, t1)]);
            b.node(nb(c, t2), Side::B, vec![na(c, t1), na(c, t2)]);
        }

        // Level 2: three 6-node gadgets. Only q_0 and q_3 see s_0; only p_4
        // and p_7 see t_0.
        for g in 0..3 {
            let (i0, i1, i2) = (3 * g, 3 * g + 1, 3 * g + 2);
            b.node(np(c, i0), Side::A, vec![nq(c, i0), nq(c, i2)]);
            let mut q0_list = vec![np(c, i0), np(c, i2), "z'".into()];
            if g < 2 {
                q0_list.push(ns(c, 0));
            }
            b.node(nq(c, i0), Side::B, q0_list);
            let mut p1_list = vec![nq(c, i1), nq(c, i2), "z".into()];
            if g > 0 {
                p1_list.push(nt(c, 0));
            }
            b.node(np(c, i1), Side::A, p1_list);
            b.node(nq(c, i1), Side::B, vec![np(c, i1), np(c, i2)]);
            let mut p2_list = vec![nq(c, i0), ny(clause[OUTER_Y[g]]), nq(c, i1), nq(c, i2)];
            p2_list.extend(clauses.iter().map(|&c2| nt(c2, 0)));
            b.node(np(c, i2), Side::A, p2_list);
            let mut q2_list = vec![np(c, i1), nx(clause[OUTER_X[g]]), np(c, i0), np(c, i2)];
            q2_list.extend(clauses.iter().map(|&c2| ns(c2, 0)));
            b.node(nq(c, i2), Side::B, q2_list);
        }

        // Level 3: one 8-node gadget. s_0 interleaves q_0 and q_3, t_0
        // interleaves p_7 and p_4, both tails span all levels 1 and 2.
        {
            let mut s0 = vec![nt(c, 1), nq(c, 0), nt(c, 2), nq(c, 3), nt(c, 3)];
            s0.extend((1..=nv).map(nyp));
            for &c2 in &clauses {
                s0.extend([nq(c2, 2), nq(c2, 5), nq(c2, 8)]);
            }
            b.node(ns(c, 0), Side::A, s0);
            let mut t0 = vec![ns(c, 3), np(c, 7), ns(c, 2), np(c, 4), ns(c, 1)];
            t0.extend((1..=nv).map(nxp));
            for &c2 in &clauses {
                t0.extend([np(c2, 2), np(c2, 5), np(c2, 8)]);
            }
            b.node(nt(c, 0), Side::B, t0);
            for i in 1..=3 {
                b.node(ns(c, i), Side::A, vec![nt(c, i), nt(c, 0)]);
                b.node(nt(c, i), Side::B, vec![ns(c, i), ns(c, 0)]);
            }
        }
    }
    b
}

/// Adds the extra level-1 gadget `x0, x'0, y0, y'0` (variant `G0`).
fn add_x0(phi: &PositiveCnf, b: &mut Builder) {
    let clauses: Vec<usize> = (1..=phi.clauses.len()).collect();
    b.node(nx(0), Side::A, vec![ny(0), nyp(0)]);
    let mut xp = vec![ny(0), nyp(0)];
    xp.extend(clauses.iter().map(|&c| nt(c, 0)));
    b.node(nxp(0), Side::A, xp);
    b.node(ny(0), Side::B, vec![nx(0), nxp(0)]);
    let mut yp = vec![nx(0), nxp(0)];
    yp.extend(clauses.iter().map(|&c| ns(c, 0)));
    b.node(nyp(0), Side::B, yp);
    // y'0 sits at the bottom of every s_0 list, x'0 at the bottom of t_0.
    for &c in &clauses {
        b.prefs.get_mut(&ns(c, 0)).unwrap().push(nyp(0));
        b.prefs.get_mut(&nt(c, 0)).unwrap().push(nxp(0));
    }
}

/// Merges `z` and `z'` into a single roommates node `z` (variant `GPrime`).
fn merge_z(phi: &PositiveCnf, b: Builder) -> Builder {
    let nv = phi.num_vars;
    let clauses: Vec<usize> = (1..=phi.clauses.len()).collect();
    let mut out = Builder::new();
    for (name, _) in &b.nodes {
        if name == "z'" {
            continue;
        }
        let list = if name == "z" {
            // Level 1, then level 2, then a0, b0, then level 0.
            let mut l: Vec<String> = Vec::new();
            for r in 1..=nv {
                l.extend([nx(r), ny(r)]);
            }
            for &c in &clauses {
                l.extend([np(c, 1), np(c, 4), np(c, 7), nq(c, 0), nq(c, 3), nq(c, 6)]);
            }
            l.extend(["a0".into(), "b0".into()]);
            for &c in &clauses {
                l.extend([na(c, 1), na(c, 3), na(c, 5), nb(c, 1), nb(c, 3), nb(c, 5)]);
            }
            l
        } else {
            b.prefs[name]
                .iter()
                .map(|e| {
                    if e == "z'" {
                        "z".to_string()
                    } else {
                        e.clone()
                    }
                })
                .collect()
        };
        out.nodes.push((name.clone(), None));
        out.prefs.insert(name.clone(), list);
    }
    out
}

/// Appends the 4-node gadget `d0..d3` (variant `H`); `d0` is adjacent to all
/// nodes except `z` and sits at the bottom of every list it joins.
fn add_d_gadget(b: &mut Builder) {
    let mut others: Vec<String> = b
        .nodes
        .iter()
        .map(|(n, _)| n.clone())
        .filter(|n| n != "z")
        .collect();
    others.sort();
    for name in &others {
        b.prefs.get_mut(name).unwrap().push("d0".into());
    }
    let mut d0 = vec!["d1".to_string(), "d2".to_string(), "d3".to_string()];
    d0.extend(others);
    for (name, list) in [
        ("d0", d0),
        ("d1", vec!["d2".into(), "d3".into(), "d0".into()]),
        ("d2", vec!["d3".into(), "d1".into(), "d0".into()]),
        ("d3", vec!["d1".into(), "d2".into(), "d0".into()]),
    ] {
        b.nodes.push((name.to_string(), None));
        b.prefs.insert(name.to_string(), list);
    }
}

/// Builds the hardness instance for `phi` in the requested variant.
pub fn build_gadget(phi: &PositiveCnf, variant: GadgetVariant) -> Result<Instance> {
    if phi.clauses.is_empty() || phi.num_vars == 0 {
        return Err(Error::Precondition(
            "formula must have at least one clause".into(),
        ));
    }
    for (ci, cl) in phi.clauses.iter().enumerate() {
        if cl.iter().any(|&v| v == 0 || v > phi.num_vars) {
            return Err(Error::Precondition(format!(
                "clause {} uses an out-of-range variable",
                ci + 1
            )));
        }
    }
    let mut b = build_g(phi);
    match variant {
        GadgetVariant::G => {}
        GadgetVariant::G0 => add_x0(phi, &mut b),
        GadgetVariant::GPrime => b = merge_z(phi, b),
        GadgetVariant::H => {
            b = merge_z(phi, b);
            add_d_gadget(&mut b);
        }
    }
    let kind = match variant {
        GadgetVariant::G | GadgetVariant::G0 => InstanceKind::Bipartite,
        GadgetVariant::GPrime | GadgetVariant::H => InstanceKind::Roommates,
    };
    let nodes = match kind {
        InstanceKind::Bipartite => b.nodes,
        InstanceKind::Roommates => b.nodes.into_iter().map(|(n, _)| (n, None)).collect(),
    };
    Instance::new(kind, nodes, b.prefs, Vec::new())
}

/// The worked stable/dominant matchings of the base instance, with the
/// explicit witness of the dominant one.
#[derive(Debug, Clone)]
pub struct Exemplars {
    /// A-optimal stable matching: identity pairings everywhere; `z`, `z'`,
    /// and the level-3 anchors stay unmatched.
    pub s: Matching,
    /// B-optimal stable matching: level-0 gadgets swapped.
    pub s_prime: Matching,
    /// The perfect dominant matching.
    pub m_star: Matching,
    pub m_star_witness: Witness,
}

fn unit(inst: &Instance, w: &mut [Rat], name: &str, v: i64) {
    w[inst.node(name).unwrap_or_else(|| panic!("node {name}"))] = Rat::from_integer(v.into());
}

/// Builds the exemplar matchings on `build_gadget(phi, G)`.
pub fn exemplar_matchings(phi: &PositiveCnf) -> Result<(Instance, Exemplars)> {
    let inst = build_gadget(phi, GadgetVariant::G)?;
    let nv = phi.num_vars;
    let clauses: Vec<usize> = (1..=phi.clauses.len()).collect();

    let mut s: Vec<(String, String)> = vec![("a0".into(), "b0".into())];
    for r in 1..=nv {
        s.push((nx(r), ny(r)));
        s.push((nxp(r), nyp(r)));
    }
    for &c in &clauses {
        for t in 1..=6 {
            s.push((na(c, t), nb(c, t)));
        }
        for t in 0..=8 {
            s.push((np(c, t), nq(c, t)));
        }
        for t in 1..=3 {
            s.push((ns(c, t), nt(c, t)));
        }
    }

    let mut s_prime: Vec<(String, String)> = vec![("a0".into(), "b0".into())];
    for r in 1..=nv {
        s_prime.push((nx(r), ny(r)));
        s_prime.push((nxp(r), nyp(r)));
    }
    for &c in &clauses {
        for g in 0..3 {
            s_prime.push((na(c, 2 * g + 1), nb(c, 2 * g + 2)));
            s_prime.push((na(c, 2 * g + 2), nb(c, 2 * g + 1)));
        }
        for t in 0..=8 {
            s_prime.push((np(c, t), nq(c, t)));
        }
        for t in 1..=3 {
            s_prime.push((ns(c, t), nt(c, t)));
        }
    }

    let mut m_star: Vec<(String, String)> =
        vec![("a0".into(), "z".into()), ("z'".into(), "b0".into())];
    for r in 1..=nv {
        m_star.push((nx(r), nyp(r)));
        m_star.push((nxp(r), ny(r)));
    }
    for &c in &clauses {
        for g in 0..3 {
            m_star.push((na(c, 2 * g + 1), nb(c, 2 * g + 2)));
            m_star.push((na(c, 2 * g + 2), nb(c, 2 * g + 1)));
        }
        for g in 0..3 {
            m_star.push((np(c, 3 * g), nq(c, 3 * g + 2)));
            m_star.push((np(c, 3 * g + 1), nq(c, 3 * g + 1)));
            m_star.push((np(c, 3 * g + 2), nq(c, 3 * g)));
        }
        m_star.push((ns(c, 0), nt(c, 1)));
        m_star.push((ns(c, 1), nt(c, 0)));
        m_star.push((ns(c, 2), nt(c, 2)));
        m_star.push((ns(c, 3), nt(c, 3)));
    }

    let mut alpha = vec![Rat::from_integer(0.into()); inst.len()];
    let w = &mut alpha;
    unit(&inst, w, "a0", 1);
    unit(&inst, w, "b0", 1);
    unit(&inst, w, "z", -1);
    unit(&inst, w, "z'", -1);
    for r in 1..=nv {
        unit(&inst, w, &nx(r), 1);
        unit(&inst, w, &ny(r), 1);
        unit(&inst, w, &nxp(r), -1);
        unit(&inst, w, &nyp(r), -1);
    }
    for &c in &clauses {
        for t in 1..=6 {
            unit(&inst, w, &na(c, t), 1);
            unit(&inst, w, &nb(c, t), -1);
        }
        for g in 0..3 {
            unit(&inst, w, &np(c, 3 * g), 1);
            unit(&inst, w, &nq(c, 3 * g), 1);
            unit(&inst, w, &np(c, 3 * g + 1), 1);
            unit(&inst, w, &nq(c, 3 * g + 1), -1);
            unit(&inst, w, &np(c, 3 * g + 2), -1);
            unit(&inst, w, &nq(c, 3 * g + 2), -1);
        }
        for (name, v) in [
            (ns(c, 0), -1),
            (nt(c, 0), -1),
            (ns(c, 1), 1),
            (nt(c, 1), 1),
            (ns(c, 2), 1),
            (nt(c, 2), -1),
            (ns(c, 3), 1),
            (nt(c, 3), -1),
        ] {
            unit(&inst, w, &name, v);
        }
    }

    let resolve = |pairs: &[(String, String)]| -> Result<Matching> {
        let borrowed: Vec<(&str, &str)> = pairs
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        Matching::from_names(&inst, &borrowed)
    };
    let ex = Exemplars {
        s: resolve(&s)?,
        s_prime: resolve(&s_prime)?,
        m_star: resolve(&m_star)?,
        m_star_witness: Witness { alpha },
    };
    Ok((inst, ex))
}

/// Builds the popular-but-neither matching for a 1-in-3 satisfying
/// assignment, together with its witness.
///
/// Per clause, let `j` be the position (1-based column) of the true variable:
/// the level-0 gadget in column `j mod 3` is swapped, the others take the
/// identity pairing (the free middle choice resolves to the identity); the
/// level-2 gadget in column `j-1` stays in zero state while the column whose
/// outer `x`-neighbor is true takes the inward pairing and the column whose
/// outer `y`-neighbor is true takes the outward pairing; the level-3 anchor
/// pair `s_0, t_0` matches towards index `j`.
pub fn assignment_to_matching(
    phi: &PositiveCnf,
    assignment: &Assignment,
) -> Result<(Matching, Witness)> {
    if assignment.values.len() != phi.num_vars {
        return Err(Error::Precondition("assignment arity mismatch".into()));
    }
    let inst = build_gadget(phi, GadgetVariant::G)?;
    let nv = phi.num_vars;

    let mut pairs: Vec<(String, String)> = vec![("a0".into(), "b0".into())];
    let mut alpha = vec![Rat::from_integer(0.into()); inst.len()];
    let w = &mut alpha;

    for r in 1..=nv {
        if assignment.truth(r) {
            pairs.push((nx(r), nyp(r)));
            pairs.push((nxp(r), ny(r)));
            unit(&inst, w, &nx(r), 1);
            unit(&inst, w, &ny(r), 1);
            unit(&inst, w, &nxp(r), -1);
            unit(&inst, w, &nyp(r), -1);
        } else {
            pairs.push((nx(r), ny(r)));
            pairs.push((nxp(r), nyp(r)));
        }
    }

    for (ci, clause) in phi.clauses.iter().enumerate() {
        let c = ci + 1;
        let tp = assignment.true_position(ci, clause)?;

        // Level 0: the column whose outer x'-neighbor is true gets swapped.
        for g in 0..3 {
            if OUTER_X[g] == tp {
                pairs.push((na(c, 2 * g + 1), nb(c, 2 * g + 2)));
                pairs.push((na(c, 2 * g + 2), nb(c, 2 * g + 1)));
            } else {
                pairs.push((na(c, 2 * g + 1), nb(c, 2 * g + 1)));
                pairs.push((na(c, 2 * g + 2), nb(c, 2 * g + 2)));
            }
        }

        // Level 2: zero state in column tp; inward (top pair matched to the
        // middle column nodes) where the outer x is true; outward where the
        // outer y is true.
        for g in 0..3 {
            let (i0, i1, i2) = (3 * g, 3 * g + 1, 3 * g + 2);
            if g == tp {
                pairs.push((np(c, i0), nq(c, i0)));
                pairs.push((np(c, i1), nq(c, i1)));
                pairs.push((np(c, i2), nq(c, i2)));
            } else if OUTER_X[g] == tp {
                pairs.push((np(c, i0), nq(c, i2)));
                pairs.push((np(c, i1), nq(c, i1)));
                pairs.push((np(c, i2), nq(c, i0)));
                unit(&inst, w, &np(c, i0), 1);
                unit(&inst, w, &nq(c, i0), 1);
                unit(&inst, w, &np(c, i1), 1);
                unit(&inst, w, &nq(c, i1), -1);
                unit(&inst, w, &np(c, i2), -1);
                unit(&inst, w, &nq(c, i2), -1);
            } else {
                debug_assert_eq!(OUTER_Y[g], tp);
                pairs.push((np(c, i0), nq(c, i0)));
                pairs.push((np(c, i2), nq(c, i1)));
                pairs.push((np(c, i1), nq(c, i2)));
                unit(&inst, w, &nq(c, i0), 1);
                unit(&inst, w, &np(c, i1), 1);
                unit(&inst, w, &nq(c, i1), 1);
                unit(&inst, w, &np(c, i0), -1);
                unit(&inst, w, &np(c, i2), -1);
                unit(&inst, w, &nq(c, i2), -1);
            }
        }

        // Level 3: s_0 pairs with t_{tp+1}, s_{tp+1} with t_0.
        let j = tp + 1;
        pairs.push((ns(c, 0), nt(c, j)));
        pairs.push((ns(c, j), nt(c, 0)));
        for i in 1..=3 {
            if i != j {
                pairs.push((ns(c, i), nt(c, i)));
            }
        }
        unit(&inst, w, &ns(c, 0), -1);
        unit(&inst, w, &nt(c, 0), -1);
        unit(&inst, w, &ns(c, j), 1);
        unit(&inst, w, &nt(c, j), 1);
        for i in 1..=3 {
            if i != j {
                let (sv, tv) = if i < j { (-1, 1) } else { (1, -1) };
                unit(&inst, w, &ns(c, i), sv);
                unit(&inst, w, &nt(c, i), tv);
            }
        }
    }

    let borrowed: Vec<(&str, &str)> = pairs
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    let m = Matching::from_names(&inst, &borrowed)?;
    Ok((m, Witness { alpha }))
}

/// Reads a 1-in-3 satisfying assignment off a popular matching of the base
/// gadget instance that matches all nodes except `z` and `z'`.
pub fn matching_to_assignment(
    phi: &PositiveCnf,
    inst: &Instance,
    m: &Matching,
) -> Result<Assignment> {
    let z = inst
        .node("z")
        .ok_or_else(|| Error::Precondition("not a gadget instance".into()))?;
    let zp = inst
        .node("z'")
        .ok_or_else(|| Error::Precondition("not a gadget instance".into()))?;
    for u in 0..inst.len() {
        let should_match = u != z && u != zp;
        if m.is_matched(u) != should_match {
            return Err(Error::Precondition(format!(
                "matching must cover exactly the nodes other than z and z'; {} is wrong",
                inst.name(u)
            )));
        }
    }
    if !crate::verify::is_popular_structural(inst, m).verdict {
        return Err(Error::Precondition("matching is not popular".into()));
    }
    let mut values = Vec::with_capacity(phi.num_vars);
    for r in 1..=phi.num_vars {
        let xr = inst.node(&nx(r)).unwrap();
        let ypr = inst.node(&nyp(r)).unwrap();
        values.push(m.contains(xr, ypr));
    }
    let assignment = Assignment { values };
    for (ci, clause) in phi.clauses.iter().enumerate() {
        assignment.true_position(ci, clause)?;
    }
    Ok(assignment)
}

/// All 1-in-3 satisfying assignments of a formula, in lexicographic order
/// (desk scale: exhaustive over 2^vars).
pub fn one_in_three_assignments(phi: &PositiveCnf) -> Vec<Assignment> {
    let nv = phi.num_vars;
    let mut out = Vec::new();
    for mask in 0u64..1 << nv {
        let values: Vec<bool> = (0..nv).map(|i| mask >> i & 1 == 1).collect();
        let a = Assignment { values };
        if phi
            .clauses
            .iter()
            .all(|cl| cl.iter().filter(|&&v| a.truth(v)).count() == 1)
        {
            out.push(a);
        }
    }
    out
}

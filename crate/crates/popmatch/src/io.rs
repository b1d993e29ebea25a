//! Line-oriented text formats.
//!
//! Instance file:
//! ```text
//! popmatch v1 <bipartite|roommates>
//! node <id> [A|B]
//! pref <id>: <id> <id> ...
//! cost <id> <id>: <numerator>/<denominator>
//! ```
//! `#` starts a comment. Matching files hold `match <id> <id>` lines, witness
//! files `alpha <id>: <rational>` lines, tree decomposition files
//! `bag <i>: <id> ...` and `tedge <i> <j>` lines.
//!
//! All parsers report the offending 1-based line number. All writers emit
//! canonical, byte-reproducible output.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceKind, Matching, Side};
use crate::treewidth::TreeDecomposition;
use crate::verify::Witness;
use crate::Rat;

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses an exact rational: `p/q` or a plain integer `p`.
pub fn parse_rational(tok: &str, line: usize) -> Result<Rat> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.parse::<BigInt>()
            .map_err(|_| Error::parse(line, format!("bad integer `{s}`")))
    };
    match tok.split_once('/') {
        Some((num, den)) => {
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(Error::parse(line, "zero denominator"));
            }
            Ok(Rat::new(parse_int(num)?, d))
        }
        None => Ok(Rat::from_integer(parse_int(tok)?)),
    }
}

/// Formats a rational as `p/q` (always with denominator, reduced form).
pub fn format_rational(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the instance file format.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate();
    let (header_no, header) = loop {
        match lines.next() {
            Some((i, raw)) => {
                let l = strip_comment(raw).trim();
                if !l.is_empty() {
                    break (i + 1, l.to_string());
                }
            }
            None => return Err(Error::parse(1, "missing header line")),
        }
    };
    let kind = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["popmatch", "v1", "bipartite"] => InstanceKind::Bipartite,
        ["popmatch", "v1", "roommates"] => InstanceKind::Roommates,
        _ => {
            return Err(Error::parse(
                header_no,
                format!("expected `popmatch v1 <bipartite|roommates>`, got `{header}`"),
            ))
        }
    };

    let mut nodes: Vec<(String, Option<Side>)> = Vec::new();
    let mut prefs: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut costs: Vec<((String, String), Rat)> = Vec::new();

    for (i, raw) in lines {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        match verb {
            "node" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match toks[..] {
                    [id] => nodes.push((id.to_string(), None)),
                    [id, "A"] => nodes.push((id.to_string(), Some(Side::A))),
                    [id, "B"] => nodes.push((id.to_string(), Some(Side::B))),
                    _ => return Err(Error::parse(lineno, "expected `node <id> [A|B]`")),
                }
            }
            "pref" => {
                let (owner, list) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(lineno, "expected `pref <id>: ...`"))?;
                let owner = owner.trim().to_string();
                if owner.is_empty() {
                    return Err(Error::parse(lineno, "empty node id in pref line"));
                }
                if prefs.contains_key(&owner) {
                    return Err(Error::parse(
                        lineno,
                        format!("duplicate pref line for `{owner}`"),
                    ));
                }
                let ranked: Vec<String> = list.split_whitespace().map(str::to_string).collect();
                prefs.insert(owner, ranked);
            }
            "cost" => {
                let (pair, val) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::parse(lineno, "expected `cost <id> <id>: <rational>`"))?;
                let toks: Vec<&str> = pair.split_whitespace().collect();
                let [a, b] = toks[..] else {
                    return Err(Error::parse(lineno, "expected two node ids before `:`"));
                };
                let val = val.trim();
                costs.push(((a.to_string(), b.to_string()), parse_rational(val, lineno)?));
            }
            other => return Err(Error::parse(lineno, format!("unknown directive `{other}`"))),
        }
    }

    Instance::new(kind, nodes, prefs, costs).map_err(|e| match e {
        // Structural validation has no single line to point at; keep line 0.
        Error::Parse { msg, .. } => Error::Parse { line: 0, msg },
        other => other,
    })
}

/// Writes an instance in canonical form (round-trips through `parse_instance`).
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let kind = match inst.kind() {
        InstanceKind::Bipartite => "bipartite",
        InstanceKind::Roommates => "roommates",
    };
    let _ = writeln!(out, "popmatch v1 {kind}");
    for u in 0..inst.len() {
        match inst.side(u) {
            Some(Side::A) => {
                let _ = writeln!(out, "node {} A", inst.name(u));
            }
            Some(Side::B) => {
                let _ = writeln!(out, "node {} B", inst.name(u));
            }
            None => {
                let _ = writeln!(out, "node {}", inst.name(u));
            }
        }
    }
    for u in 0..inst.len() {
        if inst.prefs(u).is_empty() {
            continue;
        }
        let list: Vec<&str> = inst.prefs(u).iter().map(|&v| inst.name(v)).collect();
        let _ = writeln!(out, "pref {}: {}", inst.name(u), list.join(" "));
    }
    for (i, &(u, v)) in inst.edges().iter().enumerate() {
        let c = &inst.costs()[i];
        if !c.is_zero() {
            let _ = writeln!(
                out,
                "cost {} {}: {}",
                inst.name(u),
                inst.name(v),
                format_rational(c)
            );
        }
    }
    out
}

/// Parses a matching file into name pairs (resolution happens separately).
pub fn parse_matching_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[..] {
            ["match", a, b] => pairs.push((a.to_string(), b.to_string())),
            _ => return Err(Error::parse(lineno, "expected `match <id> <id>`")),
        }
    }
    Ok(pairs)
}

/// Resolves parsed matching pairs against an instance.
pub fn resolve_matching(inst: &Instance, pairs: &[(String, String)]) -> Result<Matching> {
    let borrowed: Vec<(&str, &str)> = pairs
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str()))
        .collect();
    Matching::from_names(inst, &borrowed)
}

pub fn write_matching(inst: &Instance, m: &Matching) -> String {
    let mut out = String::new();
    for (a, b) in m.edge_names(inst) {
        let _ = writeln!(out, "match {a} {b}");
    }
    out
}

/// Parses a witness file into a name -> value map.
pub fn parse_witness_file(text: &str) -> Result<BTreeMap<String, Rat>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let rest = line
            .strip_prefix("alpha")
            .ok_or_else(|| Error::parse(lineno, "expected `alpha <id>: <rational>`"))?;
        let (id, val) = rest
            .split_once(':')
            .ok_or_else(|| Error::parse(lineno, "expected `alpha <id>: <rational>`"))?;
        let id = id.trim().to_string();
        if id.is_empty() || map.contains_key(&id) {
            return Err(Error::parse(
                lineno,
                format!("bad or duplicate node id `{id}`"),
            ));
        }
        map.insert(id, parse_rational(val.trim(), lineno)?);
    }
    Ok(map)
}

/// Resolves a witness map against an instance; every node must be present.
pub fn resolve_witness(inst: &Instance, map: &BTreeMap<String, Rat>) -> Result<Witness> {
    let mut alpha = Vec::with_capacity(inst.len());
    for u in 0..inst.len() {
        match map.get(inst.name(u)) {
            Some(v) => alpha.push(v.clone()),
            None => return Err(Error::WitnessMissingNode(inst.name(u).to_string())),
        }
    }
    Ok(Witness { alpha })
}

pub fn write_witness(inst: &Instance, w: &Witness) -> String {
    let mut out = String::new();
    for u in 0..inst.len() {
        let _ = writeln!(
            out,
            "alpha {}: {}",
            inst.name(u),
            format_rational(&w.alpha[u])
        );
    }
    out
}

/// Parses a tree decomposition file (`bag <i>: <id> ...`, `tedge <i> <j>`).
pub fn parse_td_file(text: &str, inst: &Instance) -> Result<TreeDecomposition> {
    let mut bags: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("bag") {
            let (idx, members) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, "expected `bag <i>: <id> ...`"))?;
            let idx: usize = idx
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, "bad bag index"))?;
            if bags.contains_key(&idx) {
                return Err(Error::parse(lineno, format!("duplicate bag {idx}")));
            }
            let mut ids = Vec::new();
            for tok in members.split_whitespace() {
                let u = inst
                    .node(tok)
                    .ok_or_else(|| Error::parse(lineno, format!("unknown node `{tok}`")))?;
                ids.push(u);
            }
            bags.insert(idx, ids);
        } else if let Some(rest) = line.strip_prefix("tedge") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let [a, b] = toks[..] else {
                return Err(Error::parse(lineno, "expected `tedge <i> <j>`"));
            };
            let a: usize = a
                .parse()
                .map_err(|_| Error::parse(lineno, "bad bag index"))?;
            let b: usize = b
                .parse()
                .map_err(|_| Error::parse(lineno, "bad bag index"))?;
            tree_edges.push((a, b));
        } else {
            return Err(Error::parse(lineno, "expected `bag` or `tedge` line"));
        }
    }
    let count = bags.len();
    for (expect, (&idx, _)) in bags.iter().enumerate() {
        if idx != expect {
            return Err(Error::parse(
                0,
                format!("bag indices must be 0..{count} contiguous"),
            ));
        }
    }
    let bag_list: Vec<Vec<usize>> = bags.into_values().collect();
    for &(a, b) in &tree_edges {
        if a >= count || b >= count {
            return Err(Error::parse(0, format!("tedge ({a},{b}) out of range")));
        }
    }
    TreeDecomposition::new(bag_list, tree_edges, inst)
}

pub fn write_td(td: &TreeDecomposition, inst: &Instance) -> String {
    let mut out = String::new();
    for (i, bag) in td.bags().iter().enumerate() {
        let mut names: Vec<&str> = bag.iter().map(|&u| inst.name(u)).collect();
        names.sort();
        let _ = writeln!(out, "bag {i}: {}", names.join(" "));
    }
    for &(a, b) in td.tree_edges() {
        let _ = writeln!(out, "tedge {a} {b}");
    }
    out
}

/// True iff every rational has denominator 1 (used to report integral costs).
pub fn all_integer(costs: &[Rat]) -> bool {
    costs
        .iter()
        .all(|c| c.denom().is_one() || c.numer().is_zero() || c.denom().abs().is_one())
}

//! Path decomposition along a separator (the juxtaposition machinery).
//!
//! A path of `G_M[X u S]` splits into maximal pieces: `P_0` up to the first
//! entry into `X`, then alternately pieces that cross `X` between two
//! `S`-nodes and pieces that stay outside `X`, and a final piece `P_inf`.
//! Odd-indexed pieces (and a final piece that touches `X`) are `S`-paths
//! inside `X u S`; they are flagged *hidden*. Trivial one-node pieces are
//! dropped; juxtaposing the remainder recovers the input path.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentLabel {
    Index(usize),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSegment {
    pub nodes: Vec<usize>,
    pub label: SegmentLabel,
    /// Odd index, or a final segment that meets `X`.
    pub hidden: bool,
}

/// Splits `path` relative to membership predicates for `S` and `X`.
/// Nodes outside both sets are allowed only outside the `X`-crossing pieces.
pub fn decompose_path(
    path: &[usize],
    in_s: impl Fn(usize) -> bool,
    in_x: impl Fn(usize) -> bool,
) -> Vec<PathSegment> {
    assert!(!path.is_empty(), "decompose_path needs a non-empty path");
    let mut segments: Vec<(Vec<usize>, SegmentLabel)> = Vec::new();

    if !path.iter().any(|&v| in_x(v)) {
        segments.push((path.to_vec(), SegmentLabel::Infinity));
        return finish(segments, in_x);
    }

    // P_0: up to the predecessor of the first X-node.
    let first_x = path.iter().position(|&v| in_x(v)).unwrap();
    let mut u_pos;
    if first_x == 0 {
        segments.push((vec![path[0]], SegmentLabel::Index(0)));
        u_pos = 0;
    } else {
        segments.push((path[..first_x].to_vec(), SegmentLabel::Index(0)));
        u_pos = first_x - 1;
    }

    let mut i = 1;
    loop {
        // Traverse until the first S-node strictly after u.
        let next_s = (u_pos + 1..path.len()).find(|&k| in_s(path[k]));
        let Some(v_pos) = next_s else {
            break;
        };
        segments.push((path[u_pos..=v_pos].to_vec(), SegmentLabel::Index(i)));
        i += 1;
        u_pos = v_pos;

        // Traverse until the first X-node strictly after u.
        let next_x = (u_pos + 1..path.len()).find(|&k| in_x(path[k]));
        let Some(x_pos) = next_x else {
            break;
        };
        // The piece ends at the predecessor of that X-node, which lies in S.
        let v_pos = x_pos - 1;
        debug_assert!(in_s(path[v_pos]));
        segments.push((path[u_pos..=v_pos].to_vec(), SegmentLabel::Index(i)));
        i += 1;
        u_pos = v_pos;
    }
    segments.push((path[u_pos..].to_vec(), SegmentLabel::Infinity));
    finish(segments, in_x)
}

fn finish(
    segments: Vec<(Vec<usize>, SegmentLabel)>,
    in_x: impl Fn(usize) -> bool,
) -> Vec<PathSegment> {
    segments
        .into_iter()
        .filter(|(nodes, _)| nodes.len() >= 2)
        .map(|(nodes, label)| {
            let hidden = match label {
                SegmentLabel::Index(i) => i % 2 == 1,
                SegmentLabel::Infinity => nodes.iter().any(|&v| in_x(v)),
            };
            PathSegment {
                nodes,
                label,
                hidden,
            }
        })
        .collect()
}

/// Concatenates segments, dropping repeated junction nodes.
pub fn juxtapose(segments: &[PathSegment]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for seg in segments {
        for &v in &seg.nodes {
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
    }
    out
}

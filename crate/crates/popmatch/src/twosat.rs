//! Minimal 2-SAT solver over an implication graph with Tarjan SCC.

/// A literal: variable index plus sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

pub fn pos(var: usize) -> Lit {
    Lit {
        var,
        positive: true,
    }
}

pub fn neg(var: usize) -> Lit {
    Lit {
        var,
        positive: false,
    }
}

pub struct TwoSat {
    n: usize,
    /// Implication edges over literal nodes 2v (positive) / 2v+1 (negative).
    adj: Vec<Vec<usize>>,
}

fn node(l: Lit) -> usize {
    2 * l.var + usize::from(!l.positive)
}

fn negation(x: usize) -> usize {
    x ^ 1
}

impl TwoSat {
    pub fn new(vars: usize) -> TwoSat {
        TwoSat {
            n: vars,
            adj: vec![Vec::new(); 2 * vars],
        }
    }

    /// Adds the clause (a or b) as the implications !a => b, !b => a.
    pub fn add_clause(&mut self, a: Lit, b: Lit) {
        self.adj[negation(node(a))].push(node(b));
        self.adj[negation(node(b))].push(node(a));
    }

    pub fn add_unit(&mut self, a: Lit) {
        self.add_clause(a, a);
    }

    /// Exactly one of a, b.
    pub fn add_xor(&mut self, a: Lit, b: Lit) {
        self.add_clause(a, b);
        self.add_clause(
            Lit {
                positive: !a.positive,
                ..a
            },
            Lit {
                positive: !b.positive,
                ..b
            },
        );
    }

    /// Returns a satisfying assignment or `None`.
    pub fn solve(&self) -> Option<Vec<bool>> {
        let comp = tarjan_scc(&self.adj);
        let mut values = vec![false; self.n];
        for v in 0..self.n {
            if comp[2 * v] == comp[2 * v + 1] {
                return None;
            }
            // Reverse topological order: the later component is the truth value.
            values[v] = comp[2 * v] < comp[2 * v + 1];
        }
        Some(values)
    }
}

/// Iterative Tarjan; returns the SCC index of each node, in reverse
/// topological order of components (edges go from higher to lower index).
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0usize; n];
    let mut comp = vec![UNSET; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;

    for start in 0..n {
        if index[start] != UNSET {
            continue;
        }
        call.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < adj[v].len() {
                let w = adj[v][*ei];
                *ei += 1;
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                call.pop();
                if let Some(&mut (parent, _)) = call.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    comp
}

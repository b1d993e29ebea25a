//! Phase-1 simplex over exact rationals, used for LP feasibility.
//!
//! Solves: does there exist x >= 0 with `A_eq x = b_eq` and `A_ge x >= b_ge`?
//! Surplus variables turn the inequalities into equalities, rows are flipped
//! to make the right-hand side nonnegative, one artificial variable per row
//! is added, and the artificial sum is minimized with Bland's rule (smallest
//! entering index, smallest leaving row), which guarantees termination.

use num::{One, Signed, Zero};

use crate::Rat;

pub struct Feasibility {
    /// Number of original variables.
    pub vars: usize,
    pub eq_rows: Vec<(Vec<Rat>, Rat)>,
    pub ge_rows: Vec<(Vec<Rat>, Rat)>,
}

impl Feasibility {
    /// Returns a feasible point for the original variables, or `None`.
    pub fn solve(&self) -> Option<Vec<Rat>> {
        let n_surplus = self.ge_rows.len();
        let m = self.eq_rows.len() + self.ge_rows.len();
        let n_struct = self.vars + n_surplus;
        let n_total = n_struct + m;

        // Tableau rows: [structural | artificial | rhs].
        let mut tab: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
        let mut basis: Vec<usize> = Vec::with_capacity(m);

        let add_row = |coeffs: Vec<Rat>, rhs: Rat, row_idx: usize, tab: &mut Vec<Vec<Rat>>| {
            let mut row = vec![Rat::zero(); n_total + 1];
            let flip = rhs.is_negative();
            for (j, c) in coeffs.into_iter().enumerate() {
                row[j] = if flip { -c } else { c };
            }
            row[n_total] = if flip { -rhs } else { rhs };
            row[n_struct + row_idx] = Rat::one();
            tab.push(row);
        };

        let mut row_idx = 0;
        for (coeffs, rhs) in &self.eq_rows {
            add_row(coeffs.clone(), rhs.clone(), row_idx, &mut tab);
            basis.push(n_struct + row_idx);
            row_idx += 1;
        }
        for (i, (coeffs, rhs)) in self.ge_rows.iter().enumerate() {
            let mut full = coeffs.clone();
            full.resize(self.vars, Rat::zero());
            let mut with_surplus = vec![Rat::zero(); n_struct];
            with_surplus[..self.vars].clone_from_slice(&full);
            with_surplus[self.vars + i] = -Rat::one();
            add_row(with_surplus, rhs.clone(), row_idx, &mut tab);
            basis.push(n_struct + row_idx);
            row_idx += 1;
        }

        // Objective: minimize the sum of artificials. Stored as the negated
        // reduced-cost row so that a positive entry signals improvement.
        let mut obj = vec![Rat::zero(); n_total + 1];
        for row in &tab {
            for j in 0..=n_total {
                obj[j] += row[j].clone();
            }
        }
        for j in n_struct..n_total {
            obj[j] = Rat::zero();
        }

        loop {
            // Bland: smallest index with positive reduced cost.
            let enter = (0..n_struct).find(|&j| obj[j].is_positive());
            let Some(enter) = enter else { break };
            // Ratio test, ties broken by smallest row index.
            let mut pivot_row: Option<usize> = None;
            let mut best: Option<Rat> = None;
            for (i, row) in tab.iter().enumerate() {
                if row[enter].is_positive() {
                    let ratio = &row[n_total] / &row[enter];
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            &ratio < b || (&ratio == b && basis[i] < basis[pivot_row.unwrap()])
                        }
                    };
                    if better {
                        best = Some(ratio);
                        pivot_row = Some(i);
                    }
                }
            }
            let Some(pr) = pivot_row else {
                // Unbounded phase-1 objective cannot happen; treat as infeasible.
                return None;
            };
            self.pivot(&mut tab, &mut obj, pr, enter, n_total);
            basis[pr] = enter;
        }

        if obj[n_total].is_positive() {
            return None;
        }
        let mut x = vec![Rat::zero(); self.vars];
        for (i, &b) in basis.iter().enumerate() {
            if b < self.vars {
                x[b] = tab[i][n_total].clone();
            }
        }
        Some(x)
    }

    fn pivot(&self, tab: &mut [Vec<Rat>], obj: &mut [Rat], pr: usize, pc: usize, width: usize) {
        let factor = tab[pr][pc].clone();
        for j in 0..=width {
            tab[pr][j] = &tab[pr][j] / &factor;
        }
        for i in 0..tab.len() {
            if i == pr || tab[i][pc].is_zero() {
                continue;
            }
            let mult = tab[i][pc].clone();
            for j in 0..=width {
                let delta = &mult * &tab[pr][j];
                tab[i][j] -= delta;
            }
        }
        if !obj[pc].is_zero() {
            let mult = obj[pc].clone();
            for j in 0..=width {
                let delta = &mult * &tab[pr][j];
                obj[j] -= delta;
            }
        }
    }
}

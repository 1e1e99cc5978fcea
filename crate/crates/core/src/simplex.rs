//! Dense exact-rational simplex, two phases, Bland's rule.
//!
//! All arithmetic is exact; the duals read off the final tableau are what
//! the bounding layer turns into propagation explanations, so nothing here
//! may round.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRel {
    Ge,
    Le,
}

/// One constraint row: sparse coefficients, relation, right-hand side.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: RowRel,
    pub rhs: Rat,
}

#[derive(Debug, Clone)]
pub struct SimplexOptimum {
    pub value: Rat,
    /// One multiplier per input row (sign as given: >= rows get
    /// non-negative duals at a minimum, <= rows non-positive).
    pub row_duals: Vec<Rat>,
    /// Reduced cost per structural variable.
    pub reduced_costs: Vec<Rat>,
    pub primal: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal(SimplexOptimum),
    /// Certificate multipliers per input row proving infeasibility.
    Infeasible { row_multipliers: Vec<Rat> },
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    /// Column of the initial identity basis per row (slack or artificial).
    init_col: Vec<usize>,
    artificial_from: usize,
}

impl Tableau {
    fn reduced_cost(&self, cost: &[Rat], j: usize) -> Rat {
        let mut r = cost[j].clone();
        for (i, row) in self.rows.iter().enumerate() {
            if !row[j].is_zero() {
                r -= cost[self.basis[i]].clone() * row[j].clone();
            }
        }
        r
    }

    fn objective_value(&self, cost: &[Rat]) -> Rat {
        let mut v = Rat::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() {
                v += cost[b].clone() * self.rhs[i].clone();
            }
        }
        v
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        debug_assert!(!p.is_zero());
        for x in self.rows[row].iter_mut() {
            *x /= p.clone();
        }
        self.rhs[row] /= p;
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for j in 0..self.ncols {
                let d = f.clone() * self.rows[row][j].clone();
                self.rows[i][j] -= d;
            }
            let d = f * self.rhs[row].clone();
            self.rhs[i] -= d;
        }
        self.basis[row] = col;
    }

    /// Minimize `cost` with Bland's rule; artificial columns may be barred
    /// from entering. Our LPs are bounded (costs are non-negative and the
    /// feasible set lies in a box), so an unbounded ray is a logic error.
    fn run(&mut self, cost: &[Rat], allow_artificial: bool) {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allow_artificial && j >= self.artificial_from {
                    break;
                }
                if self.basis.contains(&j) {
                    continue;
                }
                if self.reduced_cost(cost, j).is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else { return };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][col].is_positive() {
                    let ratio = self.rhs[i].clone() / self.rows[i][col].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let (row, _) = leave.expect("LP unbounded; bounded feasible set expected");
            self.pivot(row, col);
        }
    }
}

/// Solve `minimize c^T x  s.t. rows, x >= 0` exactly.
pub fn solve_lp(num_vars: usize, objective: &[Rat], input_rows: &[Row]) -> LpOutcome {
    assert_eq!(objective.len(), num_vars);
    // Normalize rows so every rhs is non-negative; remember flips so the
    // reported duals refer to the rows as given.
    type NormRow = (Vec<(usize, Rat)>, RowRel, Rat, bool);
    let mut rows: Vec<NormRow> = Vec::new();
    for r in input_rows {
        if r.rhs.is_negative() {
            let coeffs = r.coeffs.iter().map(|(v, c)| (*v, -c.clone())).collect();
            let rel = match r.rel {
                RowRel::Ge => RowRel::Le,
                RowRel::Le => RowRel::Ge,
            };
            rows.push((coeffs, rel, -r.rhs.clone(), true));
        } else {
            rows.push((r.coeffs.clone(), r.rel, r.rhs.clone(), false));
        }
    }
    let m = rows.len();
    let num_ge = rows.iter().filter(|r| r.1 == RowRel::Ge).count();
    // columns: structural | slack/surplus (per row) | artificial (per Ge row)
    let slack_from = num_vars;
    let artificial_from = num_vars + m;
    let ncols = num_vars + m + num_ge;
    let mut t = Tableau {
        ncols,
        rows: vec![vec![Rat::zero(); ncols]; m],
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        init_col: Vec::with_capacity(m),
        artificial_from,
    };
    let mut next_art = artificial_from;
    for (i, (coeffs, rel, rhs, _)) in rows.iter().enumerate() {
        for (v, c) in coeffs {
            t.rows[i][*v] += c.clone();
        }
        match rel {
            RowRel::Le => {
                t.rows[i][slack_from + i] = Rat::one();
                t.basis.push(slack_from + i);
                t.init_col.push(slack_from + i);
            }
            RowRel::Ge => {
                t.rows[i][slack_from + i] = -Rat::one();
                t.rows[i][next_art] = Rat::one();
                t.basis.push(next_art);
                t.init_col.push(next_art);
                next_art += 1;
            }
        }
        t.rhs.push(rhs.clone());
    }

    // Phase 1: minimize the artificial sum.
    if num_ge > 0 {
        let mut cost1 = vec![Rat::zero(); ncols];
        for c in cost1.iter_mut().take(ncols).skip(artificial_from) {
            *c = Rat::one();
        }
        t.run(&cost1, true);
        let v1 = t.objective_value(&cost1);
        if v1.is_zero() {
            // Drive zero-valued artificials out of the basis so phase 2
            // cannot raise them again; an all-zero row is redundant and its
            // artificial can safely stay basic at zero.
            for i in 0..m {
                if t.basis[i] >= artificial_from {
                    let pivot_col = (0..artificial_from)
                        .find(|&j| !t.rows[i][j].is_zero() && !t.basis.contains(&j));
                    if let Some(j) = pivot_col {
                        t.pivot(i, j);
                    }
                }
            }
        }
        if v1.is_positive() {
            // Farkas certificate from the phase-1 duals.
            let mut mult = Vec::with_capacity(m);
            for (i, (_, _, _, flipped)) in rows.iter().enumerate() {
                let mut y = Rat::zero();
                for (k, &b) in t.basis.iter().enumerate() {
                    if !cost1[b].is_zero() {
                        y += cost1[b].clone() * t.rows[k][t.init_col[i]].clone();
                    }
                }
                if *flipped {
                    y = -y;
                }
                mult.push(y);
            }
            return LpOutcome::Infeasible { row_multipliers: mult };
        }
    }

    // Phase 2 on the real objective; artificials stay at zero.
    let mut cost2 = vec![Rat::zero(); ncols];
    cost2[..num_vars].clone_from_slice(objective);
    t.run(&cost2, false);

    let value = t.objective_value(&cost2);
    let mut row_duals = Vec::with_capacity(m);
    for (i, (_, _, _, flipped)) in rows.iter().enumerate() {
        let mut y = Rat::zero();
        for (k, &b) in t.basis.iter().enumerate() {
            if !cost2[b].is_zero() {
                y += cost2[b].clone() * t.rows[k][t.init_col[i]].clone();
            }
        }
        if *flipped {
            y = -y;
        }
        row_duals.push(y);
    }
    let reduced_costs: Vec<Rat> = (0..num_vars).map(|j| t.reduced_cost(&cost2, j)).collect();
    let mut primal = vec![Rat::zero(); num_vars];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < num_vars {
            primal[b] = t.rhs[i].clone();
        }
    }
    LpOutcome::Optimal(SimplexOptimum { value, row_duals, reduced_costs, primal })
}

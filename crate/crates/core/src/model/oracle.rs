//! Exhaustive-enumeration oracle, independent of the solver.

use thiserror::Error;

use super::{cost_of, eval_constraint, satisfies_hard, Problem, VarKind};

pub const DEFAULT_SPACE_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Optimal { cost: u64, assignment: Vec<i64> },
    Infeasible,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("search space {space} exceeds cap {cap}")]
pub struct CapExceeded {
    pub space: u128,
    pub cap: u128,
}

/// Exact optimum by exhaustive enumeration over all non-relaxation
/// variables, completing each relaxation variable with its violation
/// indicator (the minimal consistent completion). Ties broken by the
/// lexicographically smallest assignment, enumerating variables in
/// declaration order with ascending values.
pub fn brute_force_optimum(p: &Problem, space_cap: u128) -> Result<OracleOutcome, CapExceeded> {
    let space = p.enumeration_space();
    if space > space_cap {
        return Err(CapExceeded { space, cap: space_cap });
    }
    let free: Vec<usize> = (0..p.vars.len())
        .filter(|&i| !matches!(p.vars[i].kind, VarKind::Relax(_)))
        .collect();
    let mut theta: Vec<i64> = p.vars.iter().map(|d| d.lo).collect();
    let mut best: Option<(u64, Vec<i64>)> = None;
    let mut cursor: Vec<i64> = free.iter().map(|&i| p.vars[i].lo).collect();
    loop {
        for (k, &i) in free.iter().enumerate() {
            theta[i] = cursor[k];
        }
        // minimal completion of relaxation variables
        for s in &p.softs {
            theta[s.relax_var] = if eval_constraint(&s.inner, &theta) { 0 } else { 1 };
        }
        if satisfies_hard(p, &theta) {
            let cost = cost_of(p, &theta);
            let better = match &best {
                None => true,
                Some((bc, _)) => cost < *bc,
            };
            if better {
                best = Some((cost, theta.clone()));
            }
        }
        // advance lexicographic cursor (last variable fastest would not be
        // lexicographic over declaration order, so increment from the end)
        let mut k = free.len();
        loop {
            if k == 0 {
                return Ok(match best {
                    Some((cost, assignment)) => OracleOutcome::Optimal { cost, assignment },
                    None => OracleOutcome::Infeasible,
                });
            }
            k -= 1;
            let i = free[k];
            if cursor[k] < p.vars[i].hi {
                cursor[k] += 1;
                for j in k + 1..free.len() {
                    cursor[j] = p.vars[free[j]].lo;
                }
                break;
            }
        }
    }
}

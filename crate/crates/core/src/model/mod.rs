//! Problem representation, soft-constraint reification, input formats and
//! the brute-force oracle.

mod native;
mod oracle;
mod wcnf;

pub use native::{parse_native, serialize_native};
pub use oracle::{brute_force_optimum, OracleOutcome, DEFAULT_SPACE_CAP};
pub use wcnf::{parse_wcnf, serialize_wcnf};

use thiserror::Error;

/// Kind of a declared variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarKind {
    Int,
    Bool,
    /// Relaxation variable introduced for the soft constraint with the given
    /// index; appears only in its guard and the objective.
    Relax(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub kind: VarKind,
}

/// Reference to a declared variable (index into `Problem::vars`).
pub type VarRef = usize;

/// A Boolean literal over a declared 0/1 variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BLit {
    pub var: VarRef,
    pub positive: bool,
}

impl BLit {
    pub fn pos(var: VarRef) -> BLit {
        BLit { var, positive: true }
    }
    pub fn neg(var: VarRef) -> BLit {
        BLit { var, positive: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinRel {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// Disjunction of Boolean literals; at least one literal.
    Clause(Vec<BLit>),
    /// sum coef*var REL bound with integer coefficients.
    Linear { terms: Vec<(i64, VarRef)>, rel: LinRel, bound: i64 },
    /// guard -> inner; enforced only when the guard literal holds.
    HalfReified { guard: BLit, inner: Box<Constraint> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftSpec {
    pub inner: Constraint,
    pub weight: u64,
}

/// Record of a reified soft constraint inside a built problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftRecord {
    pub inner: Constraint,
    pub weight: u64,
    pub relax_var: VarRef,
}

/// A constraint-optimization problem with a pseudo-Boolean objective.
///
/// Holds integer/Boolean variables, hard constraints, the reified soft
/// constraints, and an objective that is a weighted sum of Boolean
/// variables, minimized.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Problem {
    pub vars: Vec<VarDecl>,
    pub hard: Vec<Constraint>,
    pub softs: Vec<SoftRecord>,
    /// (weight, var) terms; weights are positive.
    pub objective: Vec<(u64, VarRef)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: literal index {lit} out of range (1..={max})")]
    LiteralOutOfRange { line: usize, lit: i64, max: usize },
    #[error("line {line}: weight must be >= 1")]
    NonPositiveWeight { line: usize },
    #[error("line {line}: weight {weight} exceeds top {top}")]
    WeightAboveTop { line: usize, weight: u64, top: u64 },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: undeclared variable `{name}`")]
    UndeclaredVariable { line: usize, name: String },
    #[error("line {line}: `{token}` is not an integer coefficient")]
    NonIntegerCoefficient { line: usize, token: String },
    #[error("line {line}: empty domain declaration for `{name}`")]
    EmptyDomain { line: usize, name: String },
    #[error("line {line}: malformed statement: {detail}")]
    MalformedStatement { line: usize, detail: String },
    #[error("line {line}: duplicate variable `{name}`")]
    DuplicateVariable { line: usize, name: String },
    #[error("objective weight sum overflows u64")]
    WeightOverflow,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("objective weight sum overflows u64")]
    WeightOverflow,
    #[error("weight must be >= 1")]
    ZeroWeight,
    #[error("clause must have at least one literal")]
    EmptyClause,
    #[error("variable {0} is not Boolean")]
    NotBoolean(VarRef),
    #[error("variable {0} already appears in the objective")]
    DuplicateObjectiveVar(VarRef),
}

impl Problem {
    pub fn new() -> Problem {
        Problem::default()
    }

    pub fn add_int_var(&mut self, name: &str, lo: i64, hi: i64) -> VarRef {
        assert!(lo <= hi);
        self.vars.push(VarDecl { name: name.to_string(), lo, hi, kind: VarKind::Int });
        self.vars.len() - 1
    }

    pub fn add_bool_var(&mut self, name: &str) -> VarRef {
        self.vars.push(VarDecl { name: name.to_string(), lo: 0, hi: 1, kind: VarKind::Bool });
        self.vars.len() - 1
    }

    pub fn add_hard(&mut self, c: Constraint) {
        self.hard.push(c);
    }

    /// Put a Boolean variable directly in the objective with the given
    /// weight (the variable participates in ordinary constraints).
    pub fn add_objective_term(&mut self, var: VarRef, weight: u64) -> Result<(), BuildError> {
        if weight == 0 {
            return Err(BuildError::ZeroWeight);
        }
        if self.vars[var].lo != 0 || self.vars[var].hi != 1 {
            return Err(BuildError::NotBoolean(var));
        }
        if self.is_objective_var(var) {
            return Err(BuildError::DuplicateObjectiveVar(var));
        }
        self.objective.push((weight, var));
        self.check_weight_sum()?;
        Ok(())
    }

    pub fn is_objective_var(&self, var: VarRef) -> bool {
        self.objective.iter().any(|&(_, v)| v == var)
    }

    fn check_weight_sum(&self) -> Result<(), BuildError> {
        let mut sum: u64 = 0;
        for &(w, _) in &self.objective {
            sum = sum.checked_add(w).ok_or(BuildError::WeightOverflow)?;
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> u64 {
        self.objective.iter().map(|&(w, _)| w).sum()
    }

    /// Search-space size: product of domain sizes of the variables the
    /// oracle must enumerate (relaxation variables excluded, their value is
    /// the violation indicator).
    pub fn enumeration_space(&self) -> u128 {
        let mut space: u128 = 1;
        for d in &self.vars {
            if matches!(d.kind, VarKind::Relax(_)) {
                continue;
            }
            space = space.saturating_mul((d.hi - d.lo + 1) as u128);
        }
        space
    }
}

/// Reify soft constraints: for each soft spec a fresh relaxation variable
/// `y` is created and `!y -> S` is added as a hard constraint (for a soft
/// clause this is just the clause `y \/ S`); the objective gains `w*y`.
/// Solutions may set `y` true gratuitously, so the reported cost is the
/// objective value.
pub fn reify_soft(
    vars: Vec<VarDecl>,
    hard: Vec<Constraint>,
    softs: Vec<SoftSpec>,
) -> Result<Problem, BuildError> {
    let mut p = Problem { vars, hard, softs: Vec::new(), objective: Vec::new() };
    for (i, s) in softs.into_iter().enumerate() {
        if s.weight == 0 {
            return Err(BuildError::ZeroWeight);
        }
        let relax = p.vars.len();
        p.vars.push(VarDecl {
            name: format!("_y{}", i + 1),
            lo: 0,
            hi: 1,
            kind: VarKind::Relax(i),
        });
        match &s.inner {
            Constraint::Clause(lits) => {
                if lits.is_empty() {
                    return Err(BuildError::EmptyClause);
                }
                let mut c = vec![BLit::pos(relax)];
                c.extend(lits.iter().copied());
                p.hard.push(Constraint::Clause(c));
            }
            inner => {
                p.hard.push(Constraint::HalfReified {
                    guard: BLit::neg(relax),
                    inner: Box::new(inner.clone()),
                });
            }
        }
        p.objective.push((s.weight, relax));
        p.softs.push(SoftRecord { inner: s.inner, weight: s.weight, relax_var: relax });
    }
    p.check_weight_sum()?;
    Ok(p)
}

/// Evaluate a constraint under a total assignment (indexed by `VarRef`).
pub fn eval_constraint(c: &Constraint, theta: &[i64]) -> bool {
    match c {
        Constraint::Clause(lits) => lits.iter().any(|l| {
            let v = theta[l.var];
            if l.positive {
                v == 1
            } else {
                v == 0
            }
        }),
        Constraint::Linear { terms, rel, bound } => {
            let sum: i128 = terms.iter().map(|&(c, v)| c as i128 * theta[v] as i128).sum();
            match rel {
                LinRel::Le => sum <= *bound as i128,
                LinRel::Ge => sum >= *bound as i128,
                LinRel::Eq => sum == *bound as i128,
            }
        }
        Constraint::HalfReified { guard, inner } => {
            let g = theta[guard.var];
            let holds = if guard.positive { g == 1 } else { g == 0 };
            !holds || eval_constraint(inner, theta)
        }
    }
}

/// Check a full assignment against all hard constraints of the problem.
pub fn satisfies_hard(p: &Problem, theta: &[i64]) -> bool {
    p.hard.iter().all(|c| eval_constraint(c, theta))
}

/// Objective value of a full assignment.
pub fn cost_of(p: &Problem, theta: &[i64]) -> u64 {
    p.objective.iter().map(|&(w, v)| if theta[v] == 1 { w } else { 0 }).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Example instance: four unit-weight soft clauses over a, b;
    /// softs are !b, a\/b, !a, a.
    pub fn maxsat_four_softs() -> Problem {
        let mut vars = Vec::new();
        vars.push(VarDecl { name: "a".into(), lo: 0, hi: 1, kind: VarKind::Bool });
        vars.push(VarDecl { name: "b".into(), lo: 0, hi: 1, kind: VarKind::Bool });
        let softs = vec![
            SoftSpec { inner: Constraint::Clause(vec![BLit::neg(1)]), weight: 1 },
            SoftSpec { inner: Constraint::Clause(vec![BLit::pos(0), BLit::pos(1)]), weight: 1 },
            SoftSpec { inner: Constraint::Clause(vec![BLit::neg(0)]), weight: 1 },
            SoftSpec { inner: Constraint::Clause(vec![BLit::pos(0)]), weight: 1 },
        ];
        reify_soft(vars, Vec::new(), softs).unwrap()
    }

    #[test]
    fn reify_unit_soft_clause_becomes_guarded_clause() {
        // soft clause !b, weight 1 -> hard clause y1 \/ !b
        let p = maxsat_four_softs();
        assert_eq!(p.hard[0], Constraint::Clause(vec![BLit::pos(2), BLit::neg(1)]));
        assert_eq!(p.objective.len(), 4);
        assert!(p.objective.iter().all(|&(w, _)| w == 1));
        assert_eq!(p.vars[2].kind, VarKind::Relax(0));
    }

    #[test]
    fn reify_zero_softs_gives_constant_objective() {
        let p = reify_soft(Vec::new(), Vec::new(), Vec::new()).unwrap();
        assert!(p.objective.is_empty());
        assert!(p.hard.is_empty());
    }

    #[test]
    fn reify_soft_linear_forces_relax_var_on_violation() {
        // soft linear x <= 1 over x in 1..3; at x = 3 the only consistent
        // completion has y = 1.
        let mut vars = Vec::new();
        vars.push(VarDecl { name: "x".into(), lo: 1, hi: 3, kind: VarKind::Int });
        let softs = vec![SoftSpec {
            inner: Constraint::Linear { terms: vec![(1, 0)], rel: LinRel::Le, bound: 1 },
            weight: 2,
        }];
        let p = reify_soft(vars, Vec::new(), softs).unwrap();
        // enumerate completions: x=3 with y=0 violates the guard, y=1 is fine
        assert!(!satisfies_hard(&p, &[3, 0]));
        assert!(satisfies_hard(&p, &[3, 1]));
        assert!(satisfies_hard(&p, &[1, 0]));
    }

    #[test]
    fn weight_preserving_reification() {
        // For every assignment of the original vars, the minimal objective
        // over consistent relax-var completions equals the weighted count of
        // violated softs.
        let p = maxsat_four_softs();
        for a in 0..=1i64 {
            for b in 0..=1i64 {
                let direct: u64 = p
                    .softs
                    .iter()
                    .map(|s| {
                        let theta = [a, b, 0, 0, 0, 0];
                        if eval_constraint(&s.inner, &theta) {
                            0
                        } else {
                            s.weight
                        }
                    })
                    .sum();
                let mut best = u64::MAX;
                for mask in 0..16u32 {
                    let theta = [
                        a,
                        b,
                        (mask & 1) as i64,
                        ((mask >> 1) & 1) as i64,
                        ((mask >> 2) & 1) as i64,
                        ((mask >> 3) & 1) as i64,
                    ];
                    if satisfies_hard(&p, &theta) {
                        best = best.min(cost_of(&p, &theta));
                    }
                }
                assert_eq!(best, direct, "assignment a={a} b={b}");
            }
        }
    }
}

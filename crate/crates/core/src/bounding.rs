//! Lower-bound strengthening from active cores.
//!
//! The objective constraint `c^T y < u` is kept as a working linear form.
//! In disjoint mode each newly active core is folded into it by Fourier-
//! Motzkin elimination: subtract the cheapest member coefficient from every
//! member and from the bound. Because the tightened constraint is a
//! consequence of the base constraint plus the *active* cores, a core going
//! inactive forces a rollback to just before its elimination, re-applying
//! the still-active later cores in their original order. In LP mode an
//! exact rational program over all recorded cores produces fathoming and
//! reduced-cost pruning, with explanations read off the dual solution.

use std::collections::BTreeSet;

use num_traits::{ToPrimitive, Zero};

use crate::cores::CoreRegistry;
use crate::domains::{DomainStore, Lit, VarId};
use crate::simplex::{rat, solve_lp, LpOutcome, Rat, Row, RowRel};
use crate::stats::{LpExplKind, SolverEvent, Stats, Trace};

fn rat_i128(v: i128) -> Rat {
    Rat::from_integer(num_bigint::BigInt::from(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Bounding {
    Std,
    Disjoint,
    Lp,
}

/// One elimination step: which record, its multiplier, and the working
/// constraint before the step (for rollback).
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination {
    pub record: usize,
    pub alpha: u64,
    saved_coeffs: Vec<u64>,
    saved_rhs: i128,
}

#[derive(Debug, Clone)]
struct Snapshot {
    coeffs: Vec<u64>,
    rhs: i128,
    elims: Vec<Elimination>,
    premises: Vec<Lit>,
}

#[derive(Debug)]
pub enum BoundPropagation {
    Quiet,
    /// Literals to fix, each with the conjunction of true literals that
    /// justifies it.
    Assignments(Vec<(Lit, Vec<Lit>)>),
    Conflict(Vec<Lit>),
}

#[derive(Debug)]
pub struct BoundManager {
    pub bounding: Bounding,
    /// Objective weight per variable index (0 for non-objective vars).
    weights: Vec<u64>,
    pub obj_vars: Vec<VarId>,
    /// Strict upper bound u from the best incumbent; None before the first.
    pub upper: Option<u64>,
    coeffs: Vec<u64>,
    rhs: i128,
    pub eliminations: Vec<Elimination>,
    premises: Vec<Lit>,
    undo: Vec<(u32, Snapshot)>,
    pub dirty: bool,
    pub lp_dirty: bool,
}

impl BoundManager {
    pub fn new(bounding: Bounding, obj: &[(u64, VarId)], num_vars: usize) -> Self {
        let mut weights = vec![0u64; num_vars];
        let mut obj_vars = Vec::new();
        for &(w, v) in obj {
            weights[v.index()] += w;
            obj_vars.push(v);
        }
        obj_vars.sort();
        obj_vars.dedup();
        BoundManager {
            bounding,
            coeffs: weights.clone(),
            weights,
            obj_vars,
            upper: None,
            rhs: 0,
            eliminations: Vec::new(),
            premises: Vec::new(),
            undo: Vec::new(),
            dirty: false,
            lp_dirty: false,
        }
    }

    pub fn grow(&mut self, num_vars: usize) {
        if num_vars > self.weights.len() {
            self.weights.resize(num_vars, 0);
            self.coeffs.resize(num_vars, 0);
        }
    }

    /// Working constraint as (var, coefficient) terms over the objective
    /// variables plus the strict right-hand side.
    pub fn current_constraint(&self) -> (Vec<(VarId, u64)>, i128) {
        let terms = self
            .obj_vars
            .iter()
            .map(|&v| (v, self.coeffs[v.index()]))
            .collect();
        (terms, self.rhs)
    }

    pub fn current_premises(&self) -> &[Lit] {
        &self.premises
    }

    /// Total subtracted from the bound so far; a valid objective lower
    /// bound whenever all stacked cores have empty premises.
    pub fn strengthened_amount(&self) -> u64 {
        self.eliminations.iter().map(|e| e.alpha).sum()
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            coeffs: self.coeffs.clone(),
            rhs: self.rhs,
            elims: self.eliminations.clone(),
            premises: self.premises.clone(),
        }
    }

    fn restore(&mut self, s: Snapshot) {
        self.coeffs = s.coeffs;
        self.rhs = s.rhs;
        self.eliminations = s.elims;
        self.premises = s.premises;
        self.dirty = true;
    }

    fn eliminate(&mut self, record: usize, registry: &CoreRegistry, stats: &mut Stats) {
        let members = &registry.records[record].members;
        let alpha = members.iter().map(|m| self.coeffs[m.index()]).min().unwrap_or(0);
        self.eliminations.push(Elimination {
            record,
            alpha,
            saved_coeffs: self.coeffs.clone(),
            saved_rhs: self.rhs,
        });
        for m in members {
            self.coeffs[m.index()] -= alpha;
        }
        self.rhs -= alpha as i128;
        stats.strengthenings += 1;
        self.recompute_premises(registry);
    }

    fn recompute_premises(&mut self, registry: &CoreRegistry) {
        let mut set: BTreeSet<Lit> = BTreeSet::new();
        for e in &self.eliminations {
            set.extend(registry.records[e.record].premises.iter().copied());
        }
        self.premises = set.into_iter().collect();
    }

    fn trace_current(&self, trace: &mut Trace) {
        if trace.enabled {
            let coeffs = self
                .obj_vars
                .iter()
                .map(|&v| (v, self.coeffs[v.index()]))
                .collect();
            trace.push(SolverEvent::Strengthened { coeffs, rhs: self.rhs });
        }
    }

    /// New incumbent at the root: reset the base constraint to the new
    /// bound and rebuild the strengthened form from the active core set.
    pub fn set_incumbent(
        &mut self,
        cost: u64,
        registry: &CoreRegistry,
        stats: &mut Stats,
        trace: &mut Trace,
    ) {
        self.upper = Some(cost);
        self.undo.clear();
        self.coeffs = self.weights.clone();
        self.rhs = cost as i128;
        self.eliminations.clear();
        self.premises.clear();
        if self.bounding == Bounding::Disjoint {
            let active: Vec<usize> = registry.active_records().collect();
            for idx in active {
                self.eliminate(idx, registry, stats);
            }
            self.trace_current(trace);
        }
        self.dirty = true;
        self.lp_dirty = true;
    }

    pub fn on_core_activated(
        &mut self,
        record: usize,
        registry: &CoreRegistry,
        level: u32,
        stats: &mut Stats,
        trace: &mut Trace,
    ) {
        self.lp_dirty = true;
        if self.bounding != Bounding::Disjoint || self.upper.is_none() {
            return;
        }
        self.undo.push((level, self.snapshot()));
        self.eliminate(record, registry, stats);
        self.trace_current(trace);
        self.dirty = true;
    }

    pub fn on_core_deactivated(
        &mut self,
        record: usize,
        registry: &CoreRegistry,
        level: u32,
        stats: &mut Stats,
        trace: &mut Trace,
    ) {
        self.lp_dirty = true;
        if self.bounding != Bounding::Disjoint || self.upper.is_none() {
            return;
        }
        let Some(k) = self.eliminations.iter().position(|e| e.record == record) else {
            return;
        };
        self.undo.push((level, self.snapshot()));
        let tail: Vec<usize> =
            self.eliminations[k + 1..].iter().map(|e| e.record).collect();
        self.coeffs = self.eliminations[k].saved_coeffs.clone();
        self.rhs = self.eliminations[k].saved_rhs;
        self.eliminations.truncate(k);
        // re-examine the later cores: still-active ones may now contribute
        for r in tail {
            if registry.records[r].active {
                self.eliminate(r, registry, stats);
            }
        }
        self.recompute_premises(registry);
        self.trace_current(trace);
        self.dirty = true;
    }

    pub fn undo_to(&mut self, level: u32) {
        let mut restore: Option<Snapshot> = None;
        while let Some((l, _)) = self.undo.last() {
            if *l <= level {
                break;
            }
            restore = Some(self.undo.pop().unwrap().1);
        }
        if let Some(s) = restore {
            self.restore(s);
        }
    }

    /// Propagate the working objective constraint `sum coeffs*y < rhs`.
    pub fn propagate(&mut self, store: &DomainStore) -> BoundPropagation {
        self.dirty = false;
        if self.upper.is_none() {
            return BoundPropagation::Quiet;
        }
        let mut sum_true: i128 = 0;
        let mut contributors: Vec<(u64, VarId)> = Vec::new();
        for &v in &self.obj_vars {
            let c = self.coeffs[v.index()];
            if c > 0 && store.is_true(Lit::pos(v)) {
                sum_true += c as i128;
                contributors.push((c, v));
            }
        }
        // largest first, ties by lower variable id, so citations are the
        // smallest sufficient set
        contributors.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let cite = |need: i128, store: &DomainStore| -> Vec<Lit> {
            let mut out = Vec::new();
            let mut got: i128 = 0;
            for &(c, v) in &contributors {
                if got >= need {
                    break;
                }
                got += c as i128;
                if let Some(l) = store.normalize_above_root(Lit::pos(v)) {
                    out.push(l);
                }
            }
            out.extend(self.premises.iter().copied());
            out.sort();
            out.dedup();
            out
        };
        if sum_true >= self.rhs {
            return BoundPropagation::Conflict(cite(self.rhs, store));
        }
        let mut fixes = Vec::new();
        for &v in &self.obj_vars {
            let c = self.coeffs[v.index()];
            if c == 0 || store.is_fixed(v) {
                continue;
            }
            if sum_true + c as i128 >= self.rhs {
                fixes.push((Lit::neg_bool(v), cite(self.rhs - c as i128, store)));
            }
        }
        if fixes.is_empty() {
            BoundPropagation::Quiet
        } else {
            BoundPropagation::Assignments(fixes)
        }
    }

    /// Exact LP over the recorded cores and the current variable bounds,
    /// minimizing `c^T y`. Fixed variables are substituted out: a true
    /// member satisfies its rows (inactive cores thus stay in as trivially
    /// satisfied rows) and contributes its weight to a constant, a false
    /// member leaves its rows citing the corresponding literal. For the
    /// remaining 0/1 cover rows the `y <= 1` bounds are redundant, so the
    /// tableau only carries the core rows over unfixed variables.
    pub fn lp_propagate(
        &mut self,
        store: &DomainStore,
        registry: &CoreRegistry,
        stats: &mut Stats,
        trace: &mut Trace,
    ) -> BoundPropagation {
        self.lp_dirty = false;
        if registry.records.is_empty() && self.upper.is_none() {
            return BoundPropagation::Quiet;
        }
        let mut const_cost: i128 = 0;
        let mut true_lits: Vec<Lit> = Vec::new();
        let mut unfixed: Vec<VarId> = Vec::new();
        for &v in &self.obj_vars {
            if store.is_true(Lit::pos(v)) {
                const_cost += self.weights[v.index()] as i128;
                if self.weights[v.index()] > 0 {
                    if let Some(l) = store.normalize_above_root(Lit::pos(v)) {
                        true_lits.push(l);
                    }
                }
            } else if !store.is_fixed(v) {
                unfixed.push(v);
            }
        }
        let col: std::collections::HashMap<VarId, usize> =
            unfixed.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut rows: Vec<Row> = Vec::new();
        // literals each row's validity rests on: core premises plus the
        // false-fixed members substituted out
        let mut row_cites: Vec<Vec<Lit>> = Vec::new();
        for rec in registry.records.iter() {
            if rec.members.iter().any(|&m| store.is_true(Lit::pos(m))) {
                continue; // satisfied row, zero dual
            }
            let mut cite: Vec<Lit> = rec.premises.clone();
            let mut coeffs: Vec<(usize, Rat)> = Vec::new();
            for &m in &rec.members {
                if let Some(&j) = col.get(&m) {
                    coeffs.push((j, rat(1)));
                } else if let Some(l) = store.normalize_above_root(Lit::neg_bool(m)) {
                    cite.push(l);
                }
            }
            if coeffs.is_empty() {
                // every member is false: the core is violated outright
                cite.sort();
                cite.dedup();
                trace.push(SolverEvent::LpExplanation {
                    kind: LpExplKind::Fathom,
                    lits: cite.clone(),
                    upper: self.upper,
                });
                return BoundPropagation::Conflict(cite);
            }
            rows.push(Row { coeffs, rel: RowRel::Ge, rhs: rat(1) });
            row_cites.push(cite);
        }
        if rows.is_empty() && self.upper.is_none() {
            return BoundPropagation::Quiet;
        }
        stats.lp_calls += 1;
        let objective: Vec<Rat> =
            unfixed.iter().map(|&v| rat(self.weights[v.index()] as i64)).collect();
        let cite_dual_rows = |mults: &[Rat], with_true: bool| -> Vec<Lit> {
            let mut out: Vec<Lit> = Vec::new();
            for (i, y) in mults.iter().enumerate() {
                if !y.is_zero() {
                    out.extend(row_cites[i].iter().copied());
                }
            }
            if with_true {
                out.extend(true_lits.iter().copied());
            }
            out.sort();
            out.dedup();
            out
        };
        match solve_lp(unfixed.len(), &objective, &rows) {
            LpOutcome::Infeasible { row_multipliers } => {
                let lits = cite_dual_rows(&row_multipliers, false);
                trace.push(SolverEvent::LpExplanation {
                    kind: LpExplKind::Fathom,
                    lits: lits.clone(),
                    upper: self.upper,
                });
                BoundPropagation::Conflict(lits)
            }
            LpOutcome::Optimal(o) => {
                let total = o.value.clone() + rat_i128(const_cost);
                if store.current_level() == 0 {
                    let lb = total.ceil().to_integer().to_u64().unwrap_or(0);
                    stats.raise_root_lower_bound(lb);
                }
                let Some(u) = self.upper else {
                    return BoundPropagation::Quiet;
                };
                let u = rat_i128(u as i128);
                if total >= u {
                    let lits = cite_dual_rows(&o.row_duals, true);
                    trace.push(SolverEvent::LpExplanation {
                        kind: LpExplKind::Fathom,
                        lits: lits.clone(),
                        upper: self.upper,
                    });
                    return BoundPropagation::Conflict(lits);
                }
                let mut fixes = Vec::new();
                for (j, &v) in unfixed.iter().enumerate() {
                    if total.clone() + o.reduced_costs[j].clone() >= u {
                        let lits = cite_dual_rows(&o.row_duals, true);
                        trace.push(SolverEvent::LpExplanation {
                            kind: LpExplKind::Prune(Lit::neg_bool(v)),
                            lits: lits.clone(),
                            upper: self.upper,
                        });
                        fixes.push((Lit::neg_bool(v), lits));
                    }
                }
                if fixes.is_empty() {
                    BoundPropagation::Quiet
                } else {
                    BoundPropagation::Assignments(fixes)
                }
            }
        }
    }
}

/// From-scratch disjoint strengthening; the independent route the
/// incremental manager is checked against.
///
/// Processes cores in the given order; for each, subtracts the minimum
/// working coefficient over its members from every member and from the
/// bound. Returns the final coefficients, the final strict bound, and the
/// multiplier used per core.
pub fn disjoint_strengthen(
    base: &[(VarId, u64)],
    upper: u64,
    cores: &[Vec<VarId>],
) -> (Vec<(VarId, u64)>, i128, Vec<u64>) {
    let mut coeffs: std::collections::BTreeMap<VarId, u64> = base.iter().copied().collect();
    let mut rhs = upper as i128;
    let mut alphas = Vec::with_capacity(cores.len());
    for core in cores {
        let alpha = core.iter().map(|m| coeffs.get(m).copied().unwrap_or(0)).min().unwrap_or(0);
        for m in core {
            if let Some(c) = coeffs.get_mut(m) {
                *c -= alpha;
            }
        }
        rhs -= alpha as i128;
        alphas.push(alpha);
    }
    (coeffs.into_iter().collect(), rhs, alphas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::CoreSource;

    fn v(i: u32) -> VarId {
        VarId(i)
    }

    // U = 2y1+3y2+3y3+5y4 < 7, cores {y1,y3,y4} then {y2,y3,y4}
    fn example_base() -> Vec<(VarId, u64)> {
        vec![(v(0), 2), (v(1), 3), (v(2), 3), (v(3), 5)]
    }

    #[test]
    fn strengthen_two_cores() {
        let (coeffs, rhs, alphas) = disjoint_strengthen(
            &example_base(),
            7,
            &[vec![v(0), v(2), v(3)], vec![v(1), v(2), v(3)]],
        );
        assert_eq!(alphas, vec![2, 1]);
        // after C1: 3y2 + y3 + 3y4 < 5
        // after C2: 2y2 + 2y4 < 4
        assert_eq!(coeffs, vec![(v(0), 0), (v(1), 2), (v(2), 0), (v(3), 2)]);
        assert_eq!(rhs, 4);
    }

    #[test]
    fn empty_core_list_is_identity() {
        let (coeffs, rhs, alphas) = disjoint_strengthen(&example_base(), 7, &[]);
        assert_eq!(coeffs, example_base().into_iter().collect::<Vec<_>>());
        assert_eq!(rhs, 7);
        assert!(alphas.is_empty());
    }

    #[test]
    fn zero_coefficient_member_contributes_nothing() {
        // the second core's cheapest member already has coefficient 0, so
        // its multiplier is 0 and the bound is unchanged by it
        let (_, rhs, alphas) =
            disjoint_strengthen(&[(v(0), 1), (v(1), 1)], 3, &[vec![v(0)], vec![v(0), v(1)]]);
        assert_eq!(alphas, vec![1, 0]);
        assert_eq!(rhs, 2);
    }

    fn setup_manager(bounding: Bounding) -> (BoundManager, CoreRegistry, Stats, Trace) {
        let obj: Vec<(u64, VarId)> = vec![(2, v(0)), (3, v(1)), (3, v(2)), (5, v(3))];
        let mgr = BoundManager::new(bounding, &obj, 4);
        let reg = CoreRegistry::new(&[v(0), v(1), v(2), v(3)], 4);
        (mgr, reg, Stats::default(), Trace::default())
    }

    #[test]
    fn incremental_matches_scratch_after_activation() {
        let (mut mgr, mut reg, mut stats, mut trace) = setup_manager(Bounding::Disjoint);
        mgr.set_incumbent(7, &reg, &mut stats, &mut trace);
        let c1 = reg.register_core(vec![], vec![v(0), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c1, &reg, 0, &mut stats, &mut trace);
        let c2 = reg.register_core(vec![], vec![v(1), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c2, &reg, 0, &mut stats, &mut trace);
        let (terms, rhs) = mgr.current_constraint();
        let (sterms, srhs, _) = disjoint_strengthen(
            &example_base(),
            7,
            &[vec![v(0), v(2), v(3)], vec![v(1), v(2), v(3)]],
        );
        assert_eq!(terms, sterms);
        assert_eq!(rhs, srhs);
    }

    #[test]
    fn deactivation_rolls_back_and_reapplies() {
        // after y1 turns true C1 goes inactive; the constraint becomes
        // U + 3*G2 = 2y1 + 2y4 < 4
        let (mut mgr, mut reg, mut stats, mut trace) = setup_manager(Bounding::Disjoint);
        mgr.set_incumbent(7, &reg, &mut stats, &mut trace);
        let c1 = reg.register_core(vec![], vec![v(0), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c1, &reg, 0, &mut stats, &mut trace);
        let c2 = reg.register_core(vec![], vec![v(1), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c2, &reg, 0, &mut stats, &mut trace);
        reg.on_objective_literal_true(v(0), 1);
        mgr.on_core_deactivated(c1, &reg, 1, &mut stats, &mut trace);
        let (terms, rhs) = mgr.current_constraint();
        assert_eq!(terms, vec![(v(0), 2), (v(1), 0), (v(2), 0), (v(3), 2)]);
        assert_eq!(rhs, 4);
        // backjump past the deactivation restores the two-core version
        reg.undo_to(0);
        mgr.undo_to(0);
        let (terms, rhs) = mgr.current_constraint();
        assert_eq!(terms, vec![(v(0), 0), (v(1), 2), (v(2), 0), (v(3), 2)]);
        assert_eq!(rhs, 4);
    }

    #[test]
    fn deactivating_most_recent_core_is_a_pop() {
        let (mut mgr, mut reg, mut stats, mut trace) = setup_manager(Bounding::Disjoint);
        mgr.set_incumbent(7, &reg, &mut stats, &mut trace);
        let c1 = reg.register_core(vec![], vec![v(0), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c1, &reg, 0, &mut stats, &mut trace);
        let c2 = reg.register_core(vec![], vec![v(1), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c2, &reg, 0, &mut stats, &mut trace);
        reg.on_objective_literal_true(v(1), 1);
        mgr.on_core_deactivated(c2, &reg, 1, &mut stats, &mut trace);
        let (terms, rhs) = mgr.current_constraint();
        // back to the single-core version 3y2 + y3 + 3y4 < 5
        assert_eq!(terms, vec![(v(0), 0), (v(1), 3), (v(2), 1), (v(3), 3)]);
        assert_eq!(rhs, 5);
    }

    #[test]
    fn propagation_of_strengthened_constraint() {
        // 2y1 + 2y4 < 4 with y1 = true fixes y4 = false, citing y1
        let (mut mgr, mut reg, mut stats, mut trace) = setup_manager(Bounding::Disjoint);
        let mut store = DomainStore::new();
        for _ in 0..4 {
            store.new_bool();
        }
        mgr.set_incumbent(7, &reg, &mut stats, &mut trace);
        let c1 = reg.register_core(vec![], vec![v(0), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c1, &reg, 0, &mut stats, &mut trace);
        let c2 = reg.register_core(vec![], vec![v(1), v(2), v(3)], 0, CoreSource::Analysis);
        mgr.on_core_activated(c2, &reg, 0, &mut stats, &mut trace);
        store.push_level();
        assert!(matches!(
            store.assign(Lit::pos(v(0)), crate::domains::Reason::Decision),
            crate::domains::AssignResult::Ok
        ));
        reg.on_objective_literal_true(v(0), 1);
        mgr.on_core_deactivated(c1, &reg, 1, &mut stats, &mut trace);
        match mgr.propagate(&store) {
            BoundPropagation::Assignments(fixes) => {
                assert_eq!(fixes.len(), 1);
                assert_eq!(fixes[0].0, Lit::neg_bool(v(3)));
                assert_eq!(fixes[0].1, vec![Lit::pos(v(0))]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn base_bound_propagates_like_the_paper_example() {
        // 2y1+3y2+3y3+5y4 < 7 with y2 = true propagates only !y4
        let (mut mgr, reg, mut stats, mut trace) = setup_manager(Bounding::Std);
        let _ = reg;
        let mut store = DomainStore::new();
        for _ in 0..4 {
            store.new_bool();
        }
        let reg2 = CoreRegistry::new(&[], 4);
        mgr.set_incumbent(7, &reg2, &mut stats, &mut trace);
        store.push_level();
        assert!(matches!(
            store.assign(Lit::pos(v(1)), crate::domains::Reason::Decision),
            crate::domains::AssignResult::Ok
        ));
        match mgr.propagate(&store) {
            BoundPropagation::Assignments(fixes) => {
                assert_eq!(fixes, vec![(Lit::neg_bool(v(3)), vec![Lit::pos(v(1))])]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn oversized_bound_never_fires() {
        let (mut mgr, reg, mut stats, mut trace) = setup_manager(Bounding::Std);
        let mut store = DomainStore::new();
        for _ in 0..4 {
            store.new_bool();
        }
        mgr.set_incumbent(1000, &reg, &mut stats, &mut trace);
        assert!(matches!(mgr.propagate(&store), BoundPropagation::Quiet));
    }

    #[test]
    fn lp_fathoms_when_cover_cost_reaches_the_bound() {
        let (mut mgr, mut reg, mut stats, mut trace) = setup_manager(Bounding::Lp);
        let mut store = DomainStore::new();
        for _ in 0..4 {
            store.new_bool();
        }
        reg.register_core(vec![], vec![v(0), v(2), v(3)], 0, CoreSource::Analysis);
        reg.register_core(vec![], vec![v(1), v(2), v(3)], 0, CoreSource::Analysis);
        // LP optimum over the two cover rows is 3 (take y3 at weight 3)
        mgr.set_incumbent(3, &reg, &mut stats, &mut trace);
        match mgr.lp_propagate(&store, &reg, &mut stats, &mut trace) {
            BoundPropagation::Conflict(lits) => assert!(lits.is_empty()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lp_without_cores_and_slack_bound_is_quiet() {
        let (mut mgr, reg, mut stats, mut trace) = setup_manager(Bounding::Lp);
        let mut store = DomainStore::new();
        for _ in 0..4 {
            store.new_bool();
        }
        mgr.set_incumbent(100, &reg, &mut stats, &mut trace);
        assert!(matches!(
            mgr.lp_propagate(&store, &reg, &mut stats, &mut trace),
            BoundPropagation::Quiet
        ));
    }

    #[test]
    fn lp_reduced_cost_fixing_prunes_expensive_outsider() {
        // core {y0,y1} weights (2,2) plus y2 at weight 9, u=3: the LP value
        // is 2 and y2's reduced cost is its full weight, so 2+9 >= 3 prunes
        // y2 regardless of which optimal basis the pivoting lands on
        let obj: Vec<(u64, VarId)> = vec![(2, v(0)), (2, v(1)), (9, v(2))];
        let mut mgr = BoundManager::new(Bounding::Lp, &obj, 3);
        let mut reg = CoreRegistry::new(&[v(0), v(1), v(2)], 3);
        let mut stats = Stats::default();
        let mut trace = Trace::default();
        let mut store = DomainStore::new();
        for _ in 0..3 {
            store.new_bool();
        }
        reg.register_core(vec![], vec![v(0), v(1)], 0, CoreSource::Analysis);
        mgr.set_incumbent(3, &reg, &mut stats, &mut trace);
        match mgr.lp_propagate(&store, &reg, &mut stats, &mut trace) {
            BoundPropagation::Assignments(fixes) => {
                let pruned: Vec<Lit> = fixes.iter().map(|(l, _)| *l).collect();
                assert!(pruned.contains(&Lit::neg_bool(v(2))));
                assert!(fixes.iter().all(|(_, e)| e.is_empty()));
            }
            other => panic!("{other:?}"),
        }
    }
}

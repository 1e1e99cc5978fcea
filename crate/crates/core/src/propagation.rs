//! Propagation engine: clause propagation with two watches and optional
//! notification splitting, bound-consistent linear propagation, the
//! objective-bound propagator, and the fixpoint loop that records the
//! implication graph.
//!
//! Assignments derived by propagators are queued and applied one at a time;
//! a literal whose negation is already queued conflicts immediately with
//! the resolvent of the two reasons. Failure nogoods contain only literals
//! above decision level 0.

use std::collections::{HashMap, VecDeque};

use crate::bounding::{BoundManager, BoundPropagation, Bounding};
use crate::cores::CoreRegistry;
use crate::domains::{AssignResult, DomainStore, Lit, Reason, Truth, VarId};
use crate::stats::{CoreSource, SolverEvent, Stats, Trace};

#[derive(Debug, Clone)]
pub struct Clause {
    pub lits: Vec<Lit>,
    pub learnt: bool,
    /// Split halves and recognized core clauses are never purged.
    pub protected: bool,
    pub deleted: bool,
    pub activity: f64,
    watch: [usize; 2],
}

#[derive(Debug, Clone)]
pub struct LinearCon {
    /// sum of coef*var <= upper
    pub terms: Vec<(i64, VarId)>,
    pub upper: i128,
    /// When present, the constraint is enforced only under this literal;
    /// a violated inner constraint propagates the guard's negation.
    pub guard: Option<Lit>,
}

#[derive(Debug, Clone)]
struct SplitSpec {
    members: Vec<VarId>,
}

#[derive(Debug, Clone)]
enum QueuedReason {
    Lits(Vec<Lit>),
    External(u32),
}

#[derive(Debug)]
pub enum PropResult {
    Fixpoint,
    /// Failure nogood: currently-true literals, all above level 0.
    Conflict(Vec<Lit>),
}

pub struct Engine {
    pub store: DomainStore,
    pub registry: CoreRegistry,
    pub bound: BoundManager,
    pub stats: Stats,
    pub trace: Trace,
    pub clauses: Vec<Clause>,
    watchers: Vec<Vec<usize>>,
    pub linears: Vec<LinearCon>,
    linear_subs: Vec<Vec<usize>>,
    linear_dirty: Vec<bool>,
    pub external_expls: Vec<Vec<Lit>>,
    expl_marks: Vec<usize>,
    queue: VecDeque<(Lit, QueuedReason)>,
    pending: HashMap<Lit, QueuedReason>,
    unprocessed: VecDeque<usize>,
    aux_bindings: HashMap<VarId, SplitSpec>,
    pub is_objective: Vec<bool>,
    pub is_aux: Vec<bool>,
    /// (is_multiple, decided vars) per open level, for the event trace.
    pub level_decisions: Vec<(bool, Vec<VarId>)>,
    pub notify_mode: bool,
    pub root_infeasible: bool,
    pub num_learnt: usize,
}

impl Engine {
    pub fn new(bound: BoundManager, registry: CoreRegistry, notify_mode: bool) -> Engine {
        Engine {
            store: DomainStore::new(),
            registry,
            bound,
            stats: Stats::default(),
            trace: Trace::default(),
            clauses: Vec::new(),
            watchers: Vec::new(),
            linears: Vec::new(),
            linear_subs: Vec::new(),
            linear_dirty: Vec::new(),
            external_expls: Vec::new(),
            expl_marks: Vec::new(),
            queue: VecDeque::new(),
            pending: HashMap::new(),
            unprocessed: VecDeque::new(),
            aux_bindings: HashMap::new(),
            is_objective: Vec::new(),
            is_aux: Vec::new(),
            level_decisions: Vec::new(),
            notify_mode,
            root_infeasible: false,
            num_learnt: 0,
        }
    }

    pub fn new_var(&mut self, lo: i64, hi: i64, objective: bool, aux: bool) -> VarId {
        let v = self.store.new_var(lo, hi);
        self.watchers.push(Vec::new());
        self.linear_subs.push(Vec::new());
        self.is_objective.push(objective);
        self.is_aux.push(aux);
        self.registry.grow(self.store.num_vars());
        self.bound.grow(self.store.num_vars());
        v
    }

    fn new_aux_var(&mut self) -> VarId {
        self.new_var(0, 1, false, true)
    }

    pub fn current_level(&self) -> u32 {
        self.store.current_level()
    }

    pub fn push_level(&mut self, is_multiple: bool, vars: Vec<VarId>) -> u32 {
        let lvl = self.store.push_level();
        self.expl_marks.push(self.external_expls.len());
        self.level_decisions.push((is_multiple, vars));
        lvl
    }

    pub fn decide_single(&mut self, lit: Lit) {
        self.push_level(false, vec![lit.var]);
        match self.store.assign(lit, Reason::Decision) {
            AssignResult::Ok => {}
            other => panic!("decision on fixed variable: {other:?}"),
        }
        self.drain_fresh();
        self.stats.decisions += 1;
    }

    pub fn decide_multiple(&mut self, vars: &[VarId]) {
        let lvl = self.push_level(true, vars.to_vec());
        for &v in vars {
            match self.store.assign(Lit::neg_bool(v), Reason::MultipleDecision) {
                AssignResult::Ok => {}
                other => panic!("multiple decision on fixed variable: {other:?}"),
            }
        }
        self.drain_fresh();
        self.stats.multiple_decisions += 1;
        self.trace.push(SolverEvent::MultipleDecision { level: lvl, vars: vars.to_vec() });
    }

    fn drain_fresh(&mut self) {
        let fresh: Vec<usize> = self.store.fresh_entries.drain(..).collect();
        self.unprocessed.extend(fresh);
    }

    pub fn backjump(&mut self, level: u32) {
        self.store.backjump(level);
        self.registry.undo_to(level);
        self.bound.undo_to(level);
        self.bound.dirty = true;
        self.bound.lp_dirty = true;
        if let Some(&mark) = self.expl_marks.get(level as usize) {
            self.external_expls.truncate(mark);
        }
        self.expl_marks.truncate(level as usize);
        self.level_decisions.truncate(level as usize);
        self.queue.clear();
        self.pending.clear();
        self.unprocessed.clear();
        for d in self.linear_dirty.iter_mut() {
            *d = true;
        }
    }

    /// Normalize a conjunction of currently-true literals into trail
    /// literals above level 0, sorted and deduplicated.
    pub fn normalized(&self, lits: impl IntoIterator<Item = Lit>) -> Vec<Lit> {
        let mut out: Vec<Lit> = lits
            .into_iter()
            .filter_map(|l| self.store.normalize_above_root(l))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn resolve_queued(&self, q: &QueuedReason) -> Vec<Lit> {
        match q {
            QueuedReason::Lits(v) => v.clone(),
            QueuedReason::External(i) => self.external_expls[*i as usize].clone(),
        }
    }

    pub fn reason_lits(&self, r: &Reason) -> Vec<Lit> {
        match r {
            Reason::Propagated(v) => v.clone(),
            Reason::External(i) => self.external_expls[*i as usize].clone(),
            Reason::Decision | Reason::MultipleDecision => Vec::new(),
        }
    }

    fn conflict_from(&self, mut a: Vec<Lit>, b: Vec<Lit>) -> Vec<Lit> {
        a.extend(b);
        a.sort();
        a.dedup();
        a
    }

    /// Queue `lit` for assignment with the given (already normalized)
    /// reason. An immediately contradictory queue state is a conflict.
    fn enqueue(&mut self, lit: Lit, reason: QueuedReason) -> Result<(), Vec<Lit>> {
        match self.store.truth(lit) {
            Truth::True => Ok(()),
            Truth::False => {
                let opp = self.normalized([lit.negate()]);
                Err(self.conflict_from(self.resolve_queued(&reason), opp))
            }
            Truth::Unfixed => {
                if let Some(r2) = self.pending.get(&lit.negate()) {
                    let n2 = self.resolve_queued(r2);
                    return Err(self.conflict_from(self.resolve_queued(&reason), n2));
                }
                if let std::collections::hash_map::Entry::Vacant(e) = self.pending.entry(lit) {
                    e.insert(reason.clone());
                    self.queue.push_back((lit, reason));
                }
                Ok(())
            }
        }
    }

    fn enqueue_lits(&mut self, lit: Lit, reason: Vec<Lit>) -> Result<(), Vec<Lit>> {
        self.enqueue(lit, QueuedReason::Lits(reason))
    }

    fn enqueue_external(&mut self, lit: Lit, expl: Vec<Lit>) -> Result<(), Vec<Lit>> {
        let idx = self.external_expls.len() as u32;
        self.external_expls.push(expl);
        self.enqueue(lit, QueuedReason::External(idx))
    }

    /// Attach a clause; in notify mode a clause mixing objective literals Y
    /// (at least two) with others X is split through a fresh literal `l`
    /// into `X \/ l` and `!l \/ Y`, and `l` turning true raises a core
    /// activation. A clause made purely of objective literals is itself a
    /// core and is registered when attached.
    pub fn attach_clause(&mut self, lits: Vec<Lit>, learnt: bool, notify: bool) {
        let mut lits = lits;
        lits.sort();
        lits.dedup();
        if lits.is_empty() {
            self.root_infeasible = true;
            return;
        }
        if lits.iter().any(|l| lits.binary_search(&l.negate()).is_ok()) {
            return; // tautology
        }
        if notify {
            let (ys, xs): (Vec<Lit>, Vec<Lit>) = lits
                .iter()
                .partition(|l| l.is_bool_true() && self.is_objective[l.var.index()]);
            if ys.len() >= 2 && !xs.is_empty() {
                let aux = self.new_aux_var();
                let members: Vec<VarId> = ys.iter().map(|l| l.var).collect();
                self.aux_bindings.insert(aux, SplitSpec { members });
                let mut left = xs;
                left.push(Lit::pos(aux));
                let mut right = vec![Lit::neg_bool(aux)];
                right.extend(ys);
                self.attach_physical(left, learnt, true);
                self.attach_physical(right, learnt, true);
                return;
            }
            if ys.len() >= 2 && xs.is_empty() {
                let members: Vec<VarId> = ys.iter().map(|l| l.var).collect();
                if !members.iter().any(|&m| self.store.is_true(Lit::pos(m))) {
                    self.register_notified_core(Vec::new(), members, CoreSource::Attach);
                }
                self.attach_physical(lits, learnt, true);
                return;
            }
        }
        self.attach_physical(lits, learnt, false);
    }

    /// Register a core produced by conflict analysis (nested mode).
    pub fn register_core_from_analysis(&mut self, premises: Vec<Lit>, members: Vec<VarId>) {
        self.register_notified_core(premises, members, CoreSource::Analysis);
    }

    /// Resolve any auxiliary split literals out of a premise set by
    /// substituting their trail reasons, so registry premises stay over
    /// problem variables.
    fn expand_aux_literals(&self, lits: Vec<Lit>) -> Vec<Lit> {
        let mut out: Vec<Lit> = Vec::new();
        let mut stack = lits;
        while let Some(l) = stack.pop() {
            if self.is_aux[l.var.index()] {
                let pos = self
                    .store
                    .trail_pos(l)
                    .expect("auxiliary reason literal must be on the trail");
                stack.extend(self.reason_lits(&self.store.entry(pos).reason));
            } else if self.store.decision_level_of(l) > 0 {
                out.push(l);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn register_notified_core(&mut self, premises: Vec<Lit>, members: Vec<VarId>, src: CoreSource) {
        // a record is active from birth, so no member may be true already
        debug_assert!(members.iter().all(|&m| !self.store.is_true(Lit::pos(m))));
        let level = self.current_level();
        let rec = self.registry.register_core(premises.clone(), members.clone(), level, src);
        self.stats.cores_found += 1;
        self.trace.push(SolverEvent::CoreFound {
            source: src,
            premises,
            members,
            level,
            upper: self.bound.upper,
        });
        let (stats, trace) = (&mut self.stats, &mut self.trace);
        self.bound.on_core_activated(rec, &self.registry, level, stats, trace);
    }

    fn attach_physical(&mut self, lits: Vec<Lit>, learnt: bool, protected: bool) {
        if learnt {
            self.num_learnt += 1;
        }
        if lits.len() == 1 {
            if self.enqueue_lits(lits[0], Vec::new()).is_err() {
                debug_assert_eq!(self.current_level(), 0);
                self.root_infeasible = true;
            }
            return;
        }
        // watches prefer non-false literals
        let w: [usize; 2];
        let nonfalse: Vec<usize> = (0..lits.len())
            .filter(|&k| self.store.truth(lits[k]) != Truth::False)
            .collect();
        match nonfalse.len() {
            0 => {
                // only possible when attaching an already-violated original
                // constraint at the root
                self.root_infeasible = true;
                return;
            }
            1 => {
                let k = nonfalse[0];
                let reason = self.normalized(
                    lits.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, l)| l.negate()),
                );
                if self.enqueue_lits(lits[k], reason).is_err() {
                    self.root_infeasible = true;
                    return;
                }
                w = [k, if k == 0 { 1 } else { 0 }];
            }
            _ => {
                w = [nonfalse[0], nonfalse[1]];
            }
        }
        let idx = self.clauses.len();
        self.watchers[lits[w[0]].var.index()].push(idx);
        self.watchers[lits[w[1]].var.index()].push(idx);
        self.clauses.push(Clause {
            lits,
            learnt,
            protected,
            deleted: false,
            activity: 0.0,
            watch: w,
        });
    }

    /// Register a linear constraint for bound-consistent propagation.
    pub fn post_linear(&mut self, terms: Vec<(i64, VarId)>, upper: i128, guard: Option<Lit>) {
        // merge repeated variables
        let mut merged: std::collections::BTreeMap<VarId, i64> = std::collections::BTreeMap::new();
        for (c, v) in terms {
            *merged.entry(v).or_insert(0) += c;
        }
        let terms: Vec<(i64, VarId)> =
            merged.into_iter().filter(|&(_, c)| c != 0).map(|(v, c)| (c, v)).collect();
        if guard.is_none() {
            let min: i128 = terms
                .iter()
                .map(|&(c, v)| {
                    if c > 0 {
                        c as i128 * self.store.lo(v) as i128
                    } else {
                        c as i128 * self.store.hi(v) as i128
                    }
                })
                .sum();
            if min > upper && self.current_level() == 0 {
                self.root_infeasible = true;
            }
        }
        let idx = self.linears.len();
        for &(_, v) in &terms {
            self.linear_subs[v.index()].push(idx);
        }
        if let Some(g) = guard {
            self.linear_subs[g.var.index()].push(idx);
        }
        self.linears.push(LinearCon { terms, upper, guard });
        self.linear_dirty.push(true);
    }

    pub fn all_problem_vars_fixed(&self) -> bool {
        (0..self.store.num_vars())
            .all(|i| self.is_aux[i] || self.store.is_fixed(VarId(i as u32)))
    }

    /// Run propagation to mutual fixpoint across clause, linear, objective
    /// bound and (in LP mode) LP propagators.
    pub fn propagate(&mut self) -> PropResult {
        loop {
            if let Some(pos) = self.unprocessed.pop_front() {
                if let Some(n) = self.process_entry(pos) {
                    return self.finish_conflict(n);
                }
                continue;
            }
            if let Some((lit, reason)) = self.queue.pop_front() {
                self.pending.remove(&lit);
                match self.store.truth(lit) {
                    Truth::True => continue,
                    Truth::False => {
                        let opp = self.normalized([lit.negate()]);
                        let n = self.conflict_from(self.resolve_queued(&reason), opp);
                        return self.finish_conflict(n);
                    }
                    Truth::Unfixed => {
                        let r = match &reason {
                            QueuedReason::Lits(v) => Reason::Propagated(v.clone()),
                            QueuedReason::External(i) => Reason::External(*i),
                        };
                        match self.store.assign(lit, r) {
                            AssignResult::Ok => {
                                self.stats.propagations += 1;
                                self.drain_fresh();
                            }
                            AssignResult::AlreadyTrue => {}
                            AssignResult::Conflict(opp) => {
                                let reason_lits = self.resolve_queued(&reason);
                                let n = self.conflict_from(reason_lits, opp);
                                return self.finish_conflict(n);
                            }
                        }
                    }
                }
                continue;
            }
            if let Some(li) = self.linear_dirty.iter().position(|&d| d) {
                self.linear_dirty[li] = false;
                if let Some(n) = self.run_linear(li) {
                    return self.finish_conflict(n);
                }
                continue;
            }
            if self.bound.dirty {
                match self.bound.propagate(&self.store) {
                    BoundPropagation::Quiet => {}
                    BoundPropagation::Assignments(fixes) => {
                        for (lit, expl) in fixes {
                            if let Err(n) = self.enqueue_external(lit, expl) {
                                return self.finish_conflict(n);
                            }
                        }
                    }
                    BoundPropagation::Conflict(n) => {
                        return self.finish_conflict(n);
                    }
                }
                continue;
            }
            if self.bound.bounding == Bounding::Lp && self.bound.lp_dirty {
                let (store, registry, stats, trace) =
                    (&self.store, &self.registry, &mut self.stats, &mut self.trace);
                match self.bound.lp_propagate(store, registry, stats, trace) {
                    BoundPropagation::Quiet => {}
                    BoundPropagation::Assignments(fixes) => {
                        for (lit, expl) in fixes {
                            if let Err(n) = self.enqueue_external(lit, expl) {
                                return self.finish_conflict(n);
                            }
                        }
                    }
                    BoundPropagation::Conflict(n) => {
                        return self.finish_conflict(n);
                    }
                }
                continue;
            }
            if self.bound.bounding == Bounding::Disjoint
                && self.current_level() == 0
                && self.bound.current_premises().is_empty()
            {
                let lb = self.bound.strengthened_amount();
                self.stats.raise_root_lower_bound(lb);
            }
            return PropResult::Fixpoint;
        }
    }

    fn finish_conflict(&mut self, n: Vec<Lit>) -> PropResult {
        self.queue.clear();
        self.pending.clear();
        self.unprocessed.clear();
        let n: Vec<Lit> = n
            .into_iter()
            .filter(|l| self.store.decision_level_of(*l) > 0)
            .collect();
        PropResult::Conflict(n)
    }

    /// Hooks and watcher processing for one freshly assigned trail entry.
    fn process_entry(&mut self, pos: usize) -> Option<Vec<Lit>> {
        let lit = self.store.entry(pos).lit;
        let var = lit.var;
        let level = self.store.entry(pos).level;
        if self.is_objective[var.index()] {
            self.bound.dirty = true;
            self.bound.lp_dirty = true;
            if lit.is_bool_true() {
                let deactivated = self.registry.on_objective_literal_true(var, level);
                self.stats.cores_deactivated += deactivated.len() as u64;
                for rec in deactivated {
                    if self.trace.enabled {
                        let members = self.registry.records[rec].members.clone();
                        self.trace.push(SolverEvent::CoreDeactivated { members });
                    }
                    let (stats, trace) = (&mut self.stats, &mut self.trace);
                    self.bound.on_core_deactivated(rec, &self.registry, level, stats, trace);
                }
            }
        }
        if lit.is_bool_true() {
            if let Some(spec) = self.aux_bindings.get(&var).cloned() {
                // A clause with a member already true is satisfied, not an
                // active contingent core; the activation only fires when
                // every member is unfixed or false.
                if !spec.members.iter().any(|&m| self.store.is_true(Lit::pos(m))) {
                    // The core holds under whatever made the auxiliary
                    // literal true: for the split clause that is the
                    // falsified X part, but a learnt clause containing the
                    // literal works equally.
                    let reason = self.store.entry(pos).reason.clone();
                    let premises = self.expand_aux_literals(self.reason_lits(&reason));
                    self.register_notified_core(premises, spec.members, CoreSource::Notification);
                }
            }
        }
        if let Some(n) = self.process_watches(var) {
            return Some(n);
        }
        for &li in &self.linear_subs[var.index()] {
            self.linear_dirty[li] = true;
        }
        None
    }

    fn process_watches(&mut self, var: VarId) -> Option<Vec<Lit>> {
        let list = std::mem::take(&mut self.watchers[var.index()]);
        let mut keep: Vec<usize> = Vec::with_capacity(list.len());
        let mut conflict: Option<Vec<Lit>> = None;
        for (i, &ci) in list.iter().enumerate() {
            if conflict.is_some() {
                keep.extend(&list[i..]);
                break;
            }
            if self.clauses[ci].deleted {
                continue;
            }
            let lits = self.clauses[ci].lits.clone();
            let mut watch = self.clauses[ci].watch;
            if lits[watch[0]].var != var && lits[watch[1]].var != var {
                // stale entry left behind by an earlier relocation
                continue;
            }
            let t0 = self.store.truth(lits[watch[0]]);
            let t1 = self.store.truth(lits[watch[1]]);
            if t0 == Truth::True || t1 == Truth::True {
                keep.push(ci);
                continue;
            }
            for slot in 0..2 {
                if self.store.truth(lits[watch[slot]]) != Truth::False {
                    continue;
                }
                let other = watch[1 - slot];
                if let Some(k) = (0..lits.len()).find(|&k| {
                    k != watch[slot] && k != other && self.store.truth(lits[k]) != Truth::False
                }) {
                    watch[slot] = k;
                    self.watchers[lits[k].var.index()].push(ci);
                }
            }
            self.clauses[ci].watch = watch;
            let l0 = lits[watch[0]];
            let l1 = lits[watch[1]];
            let keeps_var = l0.var == var || l1.var == var;
            if keeps_var {
                keep.push(ci);
            }
            match (self.store.truth(l0), self.store.truth(l1)) {
                (Truth::False, Truth::False) => {
                    let n = self.normalized(lits.iter().map(|l| l.negate()));
                    self.clauses[ci].activity += 1.0;
                    conflict = Some(n);
                }
                (Truth::Unfixed, Truth::False) | (Truth::False, Truth::Unfixed) => {
                    let (unit, upos) = if self.store.truth(l0) == Truth::Unfixed {
                        (l0, watch[0])
                    } else {
                        (l1, watch[1])
                    };
                    let reason = self.normalized(
                        lits.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != upos)
                            .map(|(_, l)| l.negate()),
                    );
                    self.clauses[ci].activity += 1.0;
                    if let Err(n) = self.enqueue_lits(unit, reason) {
                        conflict = Some(n);
                    }
                }
                _ => {}
            }
        }
        self.watchers[var.index()].extend(keep);
        conflict
    }

    fn run_linear(&mut self, li: usize) -> Option<Vec<Lit>> {
        let lc = self.linears[li].clone();
        let enforcing = match lc.guard {
            None => true,
            Some(g) => match self.store.truth(g) {
                Truth::True => true,
                Truth::False => return None,
                Truth::Unfixed => false,
            },
        };
        let min_act: i128 = lc
            .terms
            .iter()
            .map(|&(c, v)| {
                if c > 0 {
                    c as i128 * self.store.lo(v) as i128
                } else {
                    c as i128 * self.store.hi(v) as i128
                }
            })
            .sum();
        let bound_lits = |skip: Option<VarId>, this: &Engine| -> Vec<Lit> {
            lc.terms
                .iter()
                .filter(|&&(_, v)| Some(v) != skip)
                .map(|&(c, v)| {
                    if c > 0 {
                        Lit::geq(v, this.store.lo(v))
                    } else {
                        Lit::leq(v, this.store.hi(v))
                    }
                })
                .collect()
        };
        if !enforcing {
            // half-reified: a violated inner constraint forces the guard off
            if min_act > lc.upper {
                let g = lc.guard.unwrap();
                let reason = self.normalized(bound_lits(None, self));
                if let Err(n) = self.enqueue_lits(g.negate(), reason) {
                    return Some(n);
                }
            }
            return None;
        }
        if min_act > lc.upper {
            let mut cited = bound_lits(None, self);
            if let Some(g) = lc.guard {
                cited.push(g);
            }
            return Some(self.normalized(cited));
        }
        for &(c, v) in &lc.terms {
            if self.store.is_fixed(v) {
                continue;
            }
            let (lo, hi) = (self.store.lo(v), self.store.hi(v));
            let contrib = if c > 0 { c as i128 * lo as i128 } else { c as i128 * hi as i128 };
            let budget = lc.upper - (min_act - contrib);
            if c > 0 {
                let new_hi = div_floor(budget, c as i128);
                if new_hi < hi as i128 {
                    let mut cited = bound_lits(Some(v), self);
                    if let Some(g) = lc.guard {
                        cited.push(g);
                    }
                    let reason = self.normalized(cited);
                    if let Err(n) = self.enqueue_lits(Lit::leq(v, new_hi as i64), reason) {
                        return Some(n);
                    }
                }
            } else {
                let new_lo = div_ceil(budget, c as i128);
                if new_lo > lo as i128 {
                    let mut cited = bound_lits(Some(v), self);
                    if let Some(g) = lc.guard {
                        cited.push(g);
                    }
                    let reason = self.normalized(cited);
                    if let Err(n) = self.enqueue_lits(Lit::geq(v, new_lo as i64), reason) {
                        return Some(n);
                    }
                }
            }
        }
        None
    }

    /// Purge low-activity learnt clauses once the database exceeds `cap`,
    /// keeping protected clauses.
    pub fn reduce_db(&mut self, cap: usize) {
        let learnt: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.protected && !c.deleted
            })
            .collect();
        if learnt.len() <= cap {
            return;
        }
        let mut by_activity = learnt;
        by_activity.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .unwrap()
                .then(a.cmp(&b))
        });
        let drop_n = by_activity.len() / 2;
        for &i in by_activity.iter().take(drop_n) {
            self.clauses[i].deleted = true;
            self.num_learnt -= 1;
        }
    }
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bare_engine(nbools: usize, objective: &[usize]) -> Engine {
        let obj: Vec<(u64, VarId)> = objective.iter().map(|&i| (1, VarId(i as u32))).collect();
        let bound = BoundManager::new(Bounding::Std, &obj, nbools);
        let obj_vars: Vec<VarId> = objective.iter().map(|&i| VarId(i as u32)).collect();
        let registry = CoreRegistry::new(&obj_vars, nbools);
        let mut e = Engine::new(bound, registry, false);
        for i in 0..nbools {
            e.new_var(0, 1, objective.contains(&i), false);
        }
        e
    }

    #[test]
    fn empty_queue_reaches_fixpoint_with_no_inferences() {
        let mut e = bare_engine(2, &[]);
        e.attach_clause(vec![Lit::pos(VarId(0)), Lit::pos(VarId(1))], false, false);
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert_eq!(e.stats.propagations, 0);
    }

    #[test]
    fn unit_clause_propagates_at_root() {
        let mut e = bare_engine(1, &[]);
        e.attach_clause(vec![Lit::pos(VarId(0))], false, false);
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert!(e.store.is_true(Lit::pos(VarId(0))));
        assert_eq!(e.store.decision_level_of(Lit::pos(VarId(0))), 0);
    }

    #[test]
    fn four_soft_multiple_decision_conflict_yields_paper_nogood() {
        // reified clauses: y1|!b, y2|a|b, y3|!a, y4|a over a=0,b=1,y1..y4=2..5;
        // after the multiple decision the failure nogood is {!y3, !y4}.
        let mut e = bare_engine(6, &[2, 3, 4, 5]);
        let (a, b) = (VarId(0), VarId(1));
        let ys: Vec<VarId> = (2..6).map(|i| VarId(i)).collect();
        e.attach_clause(vec![Lit::pos(ys[0]), Lit::neg_bool(b)], false, false);
        e.attach_clause(vec![Lit::pos(ys[1]), Lit::pos(a), Lit::pos(b)], false, false);
        e.attach_clause(vec![Lit::pos(ys[2]), Lit::neg_bool(a)], false, false);
        e.attach_clause(vec![Lit::pos(ys[3]), Lit::pos(a)], false, false);
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        e.decide_multiple(&ys);
        match e.propagate() {
            PropResult::Conflict(n) => {
                assert_eq!(n, vec![Lit::neg_bool(ys[2]), Lit::neg_bool(ys[3])]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linear_propagates_bound_with_explanation() {
        // 2x + 3y <= 8 over x,y in 0..4; after x >= 2, y <= 1 cited on x>=2
        let obj: Vec<(u64, VarId)> = Vec::new();
        let bound = BoundManager::new(Bounding::Std, &obj, 0);
        let registry = CoreRegistry::new(&[], 0);
        let mut e = Engine::new(bound, registry, false);
        let x = e.new_var(0, 4, false, false);
        let y = e.new_var(0, 4, false, false);
        e.post_linear(vec![(2, x), (3, y)], 8, None);
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        e.decide_single(Lit::geq(x, 2));
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert_eq!(e.store.hi(y), 1);
        let pos = e.store.trail_pos(Lit::leq(y, 1)).unwrap();
        match &e.store.entry(pos).reason {
            Reason::Propagated(r) => assert_eq!(r, &vec![Lit::geq(x, 2)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn half_reified_violation_forces_guard_negation() {
        // guard g -> (x <= 1), x in 1..3; fixing x = 3 must force !g,
        // i.e. the relaxation variable true when g is its negation.
        let obj: Vec<(u64, VarId)> = Vec::new();
        let bound = BoundManager::new(Bounding::Std, &obj, 0);
        let registry = CoreRegistry::new(&[], 0);
        let mut e = Engine::new(bound, registry, false);
        let g = e.new_var(0, 1, false, false);
        let x = e.new_var(1, 3, false, false);
        e.post_linear(vec![(1, x)], 1, Some(Lit::pos(g)));
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        e.decide_single(Lit::eq(x, 3));
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert!(e.store.is_true(Lit::neg_bool(g)));
    }

    #[test]
    fn notify_split_emits_activation_when_premise_fires() {
        // clause b | c | !d with objective b,c: splits as !d | l and !l | b | c;
        // d=true propagates l and registers core {b,c} contingent on {d}.
        let mut e = bare_engine(3, &[0, 1]);
        e.notify_mode = true;
        let (b, c, d) = (VarId(0), VarId(1), VarId(2));
        e.attach_clause(
            vec![Lit::pos(b), Lit::pos(c), Lit::neg_bool(d)],
            false,
            true,
        );
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert_eq!(e.registry.records.len(), 0);
        e.decide_single(Lit::pos(d));
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert_eq!(e.registry.records.len(), 1);
        let rec = &e.registry.records[0];
        assert_eq!(rec.members, vec![b, c]);
        assert_eq!(rec.premises, vec![Lit::pos(d)]);
        assert!(rec.active);
        assert_eq!(e.registry.active_count(b), 1);
        // backjumping removes the activation again
        e.backjump(0);
        assert_eq!(e.registry.records.len(), 0);
    }

    #[test]
    fn notify_activation_suppressed_when_a_member_is_already_true() {
        // b true satisfies b | c | !d, so d=true may fire the auxiliary
        // literal but must not register a core
        let mut e = bare_engine(3, &[0, 1]);
        e.notify_mode = true;
        let (b, c, d) = (VarId(0), VarId(1), VarId(2));
        e.attach_clause(vec![Lit::pos(b), Lit::pos(c), Lit::neg_bool(d)], false, true);
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        e.decide_single(Lit::pos(b));
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        e.decide_single(Lit::pos(d));
        assert!(matches!(e.propagate(), PropResult::Fixpoint));
        assert_eq!(e.registry.records.len(), 0);
        assert_eq!(e.registry.active_count(c), 0);
    }

    #[test]
    fn pure_objective_clause_registers_at_attach() {
        let mut e = bare_engine(2, &[0, 1]);
        e.notify_mode = true;
        e.attach_clause(vec![Lit::pos(VarId(0)), Lit::pos(VarId(1))], false, true);
        assert_eq!(e.registry.records.len(), 1);
        assert!(e.registry.records[0].premises.is_empty());
    }

    #[test]
    fn reduce_db_purges_low_activity_learnt_clauses_only() {
        let mut e = bare_engine(8, &[]);
        for i in 0..3 {
            e.attach_clause(vec![Lit::pos(VarId(i)), Lit::pos(VarId(i + 1))], false, false);
        }
        for i in 0..6u32 {
            e.attach_clause(vec![Lit::pos(VarId(i % 8)), Lit::neg_bool(VarId((i + 2) % 8))], true, false);
        }
        let protected_before = e.clauses.iter().filter(|c| !c.learnt).count();
        e.reduce_db(2);
        let deleted = e.clauses.iter().filter(|c| c.deleted).count();
        assert_eq!(deleted, 3); // half of the six learnt clauses
        assert!(e.clauses.iter().filter(|c| c.deleted).all(|c| c.learnt));
        assert_eq!(e.clauses.iter().filter(|c| !c.learnt).count(), protected_before);
    }

    #[test]
    fn split_preserves_solutions_on_original_vars() {
        // exhaustive: X | Y equisatisfiable with (X | l) & (!l | Y) projected
        let mut e = bare_engine(4, &[0, 1]);
        e.notify_mode = true;
        let lits = vec![
            Lit::pos(VarId(0)),
            Lit::pos(VarId(1)),
            Lit::neg_bool(VarId(2)),
            Lit::pos(VarId(3)),
        ];
        e.attach_clause(lits.clone(), false, true);
        // for every assignment of the 4 original vars, the original clause is
        // satisfiable iff the split pair is satisfiable for some l
        for mask in 0..16u32 {
            let vals: Vec<i64> = (0..4).map(|i| ((mask >> i) & 1) as i64).collect();
            let orig = lits.iter().any(|l| {
                let v = vals[l.var.index()];
                if l.is_bool_true() {
                    v == 1
                } else {
                    v == 0
                }
            });
            let xs_false = vals[2] == 0 || vals[3] == 1; // X = {!v2, v3}
            let x_sat = !(vals[2] == 1 && vals[3] == 0);
            let _ = xs_false;
            let y_sat = vals[0] == 1 || vals[1] == 1;
            // split satisfiable with l=false iff X satisfied; with l=true iff Y satisfied
            let split = x_sat || y_sat;
            assert_eq!(orig, split, "mask {mask:04b}");
        }
    }
}

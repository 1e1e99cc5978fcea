//! Variable store, atom literals, trail and decision levels.
//!
//! Domains are intervals plus a hole set. Every domain change is recorded as
//! a trail entry carrying the literal that was fixed, the decision level and
//! the reason, which together form the implication graph that conflict
//! analysis walks.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LitKind {
    Eq,
    Neq,
    Geq,
    Leq,
}

/// An atom literal over an integer (or Boolean 0/1) variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    pub var: VarId,
    pub kind: LitKind,
    pub value: i64,
}

impl Lit {
    pub fn eq(var: VarId, value: i64) -> Lit {
        Lit { var, kind: LitKind::Eq, value }
    }
    pub fn neq(var: VarId, value: i64) -> Lit {
        Lit { var, kind: LitKind::Neq, value }
    }
    pub fn geq(var: VarId, value: i64) -> Lit {
        Lit { var, kind: LitKind::Geq, value }
    }
    pub fn leq(var: VarId, value: i64) -> Lit {
        Lit { var, kind: LitKind::Leq, value }
    }
    /// True-literal of a Boolean (0/1) variable.
    pub fn pos(var: VarId) -> Lit {
        Lit::geq(var, 1)
    }
    /// False-literal of a Boolean (0/1) variable.
    pub fn neg_bool(var: VarId) -> Lit {
        Lit::leq(var, 0)
    }
    pub fn bool_lit(var: VarId, positive: bool) -> Lit {
        if positive {
            Lit::pos(var)
        } else {
            Lit::neg_bool(var)
        }
    }

    /// Negation is an involution: eq <-> neq, geq(v) <-> leq(v-1).
    pub fn negate(self) -> Lit {
        match self.kind {
            LitKind::Eq => Lit::neq(self.var, self.value),
            LitKind::Neq => Lit::eq(self.var, self.value),
            LitKind::Geq => Lit::leq(self.var, self.value - 1),
            LitKind::Leq => Lit::geq(self.var, self.value + 1),
        }
    }

    /// Is this the true-literal of a 0/1 variable?
    pub fn is_bool_true(self) -> bool {
        self.kind == LitKind::Geq && self.value == 1
    }
    pub fn is_bool_false(self) -> bool {
        self.kind == LitKind::Leq && self.value == 0
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LitKind::Eq => write!(f, "[{}={}]", self.var, self.value),
            LitKind::Neq => write!(f, "[{}!={}]", self.var, self.value),
            LitKind::Geq => write!(f, "[{}>={}]", self.var, self.value),
            LitKind::Leq => write!(f, "[{}<={}]", self.var, self.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unfixed,
}

/// Why a trail entry was fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    Decision,
    MultipleDecision,
    /// Conjunction of literals, all true strictly earlier on the trail,
    /// that implies the entry's literal.
    Propagated(Vec<Lit>),
    /// Index into an explanation arena owned by the engine; resolved only
    /// when conflict analysis needs it.
    External(u32),
}

#[derive(Debug, Clone)]
pub struct TrailEntry {
    pub lit: Lit,
    pub level: u32,
    pub reason: Reason,
}

#[derive(Debug, Clone)]
struct VarState {
    orig_lo: i64,
    orig_hi: i64,
    lo: i64,
    hi: i64,
    holes: BTreeSet<i64>,
    /// Trail positions that touched this variable, in order.
    history: Vec<usize>,
}

impl VarState {
    fn contains(&self, v: i64) -> bool {
        v >= self.lo && v <= self.hi && !self.holes.contains(&v)
    }
    fn is_fixed(&self) -> bool {
        self.lo == self.hi
    }
}

/// Result of fixing a literal in the store.
#[derive(Debug)]
pub enum AssignResult {
    Ok,
    AlreadyTrue,
    /// The domain would empty. Carries the currently-true literals that
    /// oppose the assignment (already normalized to trail literals,
    /// root facts dropped).
    Conflict(Vec<Lit>),
}

/// Interval-plus-holes domain store with trail and level marks.
#[derive(Debug, Default)]
pub struct DomainStore {
    vars: Vec<VarState>,
    pub trail: Vec<TrailEntry>,
    /// Position in `trail` where each decision level starts; level 0 is
    /// everything before `level_marks[0]`.
    level_marks: Vec<usize>,
    assigned_at: HashMap<Lit, usize>,
    /// Trail entries appended by the most recent `assign`, including
    /// derived literals. Consumed by the propagation engine.
    pub fresh_entries: Vec<usize>,
}

pub const MAX_EQ_WIDTH: i64 = 4096;

impl DomainStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self, lo: i64, hi: i64) -> VarId {
        assert!(lo <= hi, "empty initial domain");
        let id = VarId(self.vars.len() as u32);
        self.vars.push(VarState {
            orig_lo: lo,
            orig_hi: hi,
            lo,
            hi,
            holes: BTreeSet::new(),
            history: Vec::new(),
        });
        id
    }

    pub fn new_bool(&mut self) -> VarId {
        self.new_var(0, 1)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn lo(&self, v: VarId) -> i64 {
        self.vars[v.index()].lo
    }
    pub fn hi(&self, v: VarId) -> i64 {
        self.vars[v.index()].hi
    }
    pub fn orig_lo(&self, v: VarId) -> i64 {
        self.vars[v.index()].orig_lo
    }
    pub fn orig_hi(&self, v: VarId) -> i64 {
        self.vars[v.index()].orig_hi
    }
    pub fn is_fixed(&self, v: VarId) -> bool {
        self.vars[v.index()].is_fixed()
    }
    pub fn fixed_value(&self, v: VarId) -> Option<i64> {
        let s = &self.vars[v.index()];
        if s.is_fixed() {
            Some(s.lo)
        } else {
            None
        }
    }
    pub fn domain_width(&self, v: VarId) -> i64 {
        let s = &self.vars[v.index()];
        s.orig_hi - s.orig_lo + 1
    }
    pub fn supports_eq(&self, v: VarId) -> bool {
        self.domain_width(v) <= MAX_EQ_WIDTH
    }

    pub fn current_level(&self) -> u32 {
        self.level_marks.len() as u32
    }

    pub fn truth(&self, lit: Lit) -> Truth {
        let s = &self.vars[lit.var.index()];
        match lit.kind {
            LitKind::Geq => {
                if s.lo >= lit.value {
                    Truth::True
                } else if s.hi < lit.value {
                    Truth::False
                } else {
                    Truth::Unfixed
                }
            }
            LitKind::Leq => {
                if s.hi <= lit.value {
                    Truth::True
                } else if s.lo > lit.value {
                    Truth::False
                } else {
                    Truth::Unfixed
                }
            }
            LitKind::Eq => {
                if s.is_fixed() && s.lo == lit.value {
                    Truth::True
                } else if !s.contains(lit.value) {
                    Truth::False
                } else {
                    Truth::Unfixed
                }
            }
            LitKind::Neq => {
                if !s.contains(lit.value) {
                    Truth::True
                } else if s.is_fixed() {
                    Truth::False
                } else {
                    Truth::Unfixed
                }
            }
        }
    }

    pub fn is_true(&self, lit: Lit) -> bool {
        self.truth(lit) == Truth::True
    }
    pub fn is_false(&self, lit: Lit) -> bool {
        self.truth(lit) == Truth::False
    }

    /// Fix `lit`; appends the primary entry plus any derived bound/eq
    /// entries implied by the domain change.
    pub fn assign(&mut self, lit: Lit, reason: Reason) -> AssignResult {
        match self.truth(lit) {
            Truth::True => return AssignResult::AlreadyTrue,
            Truth::False => {
                return AssignResult::Conflict(self.opposing_literals(lit));
            }
            Truth::Unfixed => {}
        }
        let level = self.current_level();
        let vi = lit.var.index();
        let (old_lo, old_hi, was_fixed) = {
            let s = &self.vars[vi];
            (s.lo, s.hi, s.is_fixed())
        };
        debug_assert!(!was_fixed);
        {
            let s = &mut self.vars[vi];
            match lit.kind {
                LitKind::Geq => {
                    s.lo = lit.value;
                    while s.lo <= s.hi && s.holes.contains(&s.lo) {
                        s.lo += 1;
                    }
                }
                LitKind::Leq => {
                    s.hi = lit.value;
                    while s.hi >= s.lo && s.holes.contains(&s.hi) {
                        s.hi -= 1;
                    }
                }
                LitKind::Eq => {
                    s.lo = lit.value;
                    s.hi = lit.value;
                }
                LitKind::Neq => {
                    if lit.value == s.lo {
                        s.lo += 1;
                        while s.lo <= s.hi && s.holes.contains(&s.lo) {
                            s.lo += 1;
                        }
                    } else if lit.value == s.hi {
                        s.hi -= 1;
                        while s.hi >= s.lo && s.holes.contains(&s.hi) {
                            s.hi -= 1;
                        }
                    } else {
                        s.holes.insert(lit.value);
                    }
                }
            }
        }
        self.push_entry(lit, level, reason);
        // Derived literals: bounds that moved past the stated value, and the
        // eq literal once the domain collapses to a singleton.
        let (new_lo, new_hi) = {
            let s = &self.vars[vi];
            (s.lo, s.hi)
        };
        // Since `lit` was unfixed, the change cannot wipe the domain out:
        // bounds always land on non-hole values.
        debug_assert!(new_lo <= new_hi);
        let derived_reason = || Reason::Propagated(vec![lit]);
        if lit.kind != LitKind::Eq {
            if new_lo > old_lo && !(lit.kind == LitKind::Geq && lit.value == new_lo) {
                let d = Lit::geq(lit.var, new_lo);
                if !self.assigned_at.contains_key(&d) {
                    self.push_entry(d, level, derived_reason());
                }
            }
            if new_hi < old_hi && !(lit.kind == LitKind::Leq && lit.value == new_hi) {
                let d = Lit::leq(lit.var, new_hi);
                if !self.assigned_at.contains_key(&d) {
                    self.push_entry(d, level, derived_reason());
                }
            }
            if new_lo == new_hi && self.supports_eq(lit.var) {
                let d = Lit::eq(lit.var, new_lo);
                if !self.assigned_at.contains_key(&d) {
                    self.push_entry(d, level, derived_reason());
                }
            }
        }
        AssignResult::Ok
    }

    fn push_entry(&mut self, lit: Lit, level: u32, reason: Reason) {
        let pos = self.trail.len();
        self.trail.push(TrailEntry { lit, level, reason });
        self.assigned_at.insert(lit, pos);
        self.vars[lit.var.index()].history.push(pos);
        self.fresh_entries.push(pos);
    }

    /// Currently-true literals opposing `lit`, normalized to trail
    /// literals; root facts are dropped.
    fn opposing_literals(&self, lit: Lit) -> Vec<Lit> {
        let neg = lit.negate();
        // The negation is true; cite its implying trail literal.
        match self.implying_entry(neg) {
            Some(pos) => vec![self.trail[pos].lit],
            None => Vec::new(),
        }
    }

    /// Earliest trail position whose cumulative effect on the variable makes
    /// `lit` true, or None when the original domain already implies it.
    pub fn implying_entry(&self, lit: Lit) -> Option<usize> {
        debug_assert!(self.is_true(lit), "implying_entry on non-true literal {lit}");
        let s = &self.vars[lit.var.index()];
        let mut lo = s.orig_lo;
        let mut hi = s.orig_hi;
        let mut holes: BTreeSet<i64> = BTreeSet::new();
        let holds = |lo: i64, hi: i64, holes: &BTreeSet<i64>, l: Lit| -> bool {
            let contains = |v: i64| v >= lo && v <= hi && !holes.contains(&v);
            match l.kind {
                LitKind::Geq => lo >= l.value,
                LitKind::Leq => hi <= l.value,
                LitKind::Eq => lo == hi && lo == l.value,
                LitKind::Neq => !contains(l.value),
            }
        };
        if holds(lo, hi, &holes, lit) {
            return None;
        }
        for &pos in &s.history {
            let e = &self.trail[pos];
            match e.lit.kind {
                LitKind::Geq => {
                    lo = lo.max(e.lit.value);
                }
                LitKind::Leq => {
                    hi = hi.min(e.lit.value);
                }
                LitKind::Eq => {
                    lo = e.lit.value;
                    hi = e.lit.value;
                }
                LitKind::Neq => {
                    if e.lit.value == lo {
                        lo += 1;
                    } else if e.lit.value == hi {
                        hi -= 1;
                    } else {
                        holes.insert(e.lit.value);
                    }
                }
            }
            while lo <= hi && holes.contains(&lo) {
                lo += 1;
            }
            while hi >= lo && holes.contains(&hi) {
                hi -= 1;
            }
            if holds(lo, hi, &holes, lit) {
                return Some(pos);
            }
        }
        unreachable!("literal {lit} true but no trail entry implies it");
    }

    /// Normalize a true literal to the exact trail literal that first made
    /// it hold. Returns None for root facts implied by the original domain.
    pub fn normalize(&self, lit: Lit) -> Option<Lit> {
        if let Some(&pos) = self.assigned_at.get(&lit) {
            return Some(self.trail[pos].lit);
        }
        self.implying_entry(lit).map(|p| self.trail[p].lit)
    }

    /// Normalized form of `lit` excluding literals fixed at level 0
    /// (used when building nogoods).
    pub fn normalize_above_root(&self, lit: Lit) -> Option<Lit> {
        let pos = match self.assigned_at.get(&lit) {
            Some(&p) => Some(p),
            None => self.implying_entry(lit),
        }?;
        if self.trail[pos].level == 0 {
            None
        } else {
            Some(self.trail[pos].lit)
        }
    }

    /// Decision level of a currently-true literal.
    pub fn decision_level_of(&self, lit: Lit) -> u32 {
        match self.assigned_at.get(&lit) {
            Some(&p) => self.trail[p].level,
            None => match self.implying_entry(lit) {
                Some(p) => self.trail[p].level,
                None => 0,
            },
        }
    }

    pub fn trail_pos(&self, lit: Lit) -> Option<usize> {
        self.assigned_at.get(&lit).copied()
    }

    pub fn entry(&self, pos: usize) -> &TrailEntry {
        &self.trail[pos]
    }

    pub fn push_level(&mut self) -> u32 {
        self.level_marks.push(self.trail.len());
        self.current_level()
    }

    /// Truncate the trail back to `level`, restoring domains exactly.
    pub fn backjump(&mut self, level: u32) {
        let cur = self.current_level();
        if level >= cur {
            return;
        }
        let mark = self.level_marks[level as usize];
        // rebuild domains by undoing entries in reverse
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            self.assigned_at.remove(&e.lit);
            let vi = e.lit.var.index();
            let h = &mut self.vars[vi].history;
            h.pop();
            // Recompute this variable's domain from scratch using the
            // remaining history; exact restoration, O(history).
            self.recompute_var(vi);
        }
        self.level_marks.truncate(level as usize);
        self.fresh_entries.retain(|&p| p < mark);
    }

    fn recompute_var(&mut self, vi: usize) {
        let (orig_lo, orig_hi) = {
            let s = &self.vars[vi];
            (s.orig_lo, s.orig_hi)
        };
        let mut lo = orig_lo;
        let mut hi = orig_hi;
        let mut holes: BTreeSet<i64> = BTreeSet::new();
        let hist: Vec<usize> = self.vars[vi].history.clone();
        for pos in hist {
            let l = self.trail[pos].lit;
            match l.kind {
                LitKind::Geq => lo = lo.max(l.value),
                LitKind::Leq => hi = hi.min(l.value),
                LitKind::Eq => {
                    lo = l.value;
                    hi = l.value;
                }
                LitKind::Neq => {
                    if l.value == lo {
                        lo += 1;
                    } else if l.value == hi {
                        hi -= 1;
                    } else {
                        holes.insert(l.value);
                    }
                }
            }
            while lo <= hi && holes.contains(&lo) {
                lo += 1;
            }
            while hi >= lo && holes.contains(&hi) {
                hi -= 1;
            }
        }
        let s = &mut self.vars[vi];
        s.lo = lo;
        s.hi = hi;
        s.holes = holes;
    }

    /// Snapshot of a variable's domain as (lo, hi, holes).
    pub fn domain_snapshot(&self, v: VarId) -> (i64, i64, Vec<i64>) {
        let s = &self.vars[v.index()];
        (s.lo, s.hi, s.holes.iter().copied().collect())
    }

    pub fn level_start(&self, level: u32) -> usize {
        if level == 0 {
            0
        } else {
            self.level_marks[(level - 1) as usize]
        }
    }
}

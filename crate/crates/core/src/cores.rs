//! Unsatisfiable-core bookkeeping for the three search strategies.
//!
//! Basic mode tracks `F`, the objective variables that have never appeared
//! in a core (not trailed; it only shrinks within a solve). Nested and
//! notification modes keep, per objective variable, a count of active cores
//! and a stack of all core records involving it; counts and stacks are
//! trailed so backjumping restores them exactly.

use std::collections::BTreeSet;

use crate::domains::{Lit, VarId};
use crate::stats::CoreSource;

#[derive(Debug, Clone, PartialEq)]
pub struct CoreRecord {
    /// Conclusions M: at least one of these objective variables must be true.
    pub members: Vec<VarId>,
    /// Premises L under which the core holds; true literals at registration.
    pub premises: Vec<Lit>,
    pub active: bool,
    pub registered_level: u32,
    pub source: CoreSource,
}

#[derive(Debug, Clone)]
enum UndoOp {
    Registered,
    Deactivated(usize),
}

#[derive(Debug, Default)]
pub struct CoreRegistry {
    pub records: Vec<CoreRecord>,
    /// F of the basic strategy: objective vars never seen in any core.
    pub never_cored: BTreeSet<VarId>,
    counts: Vec<u32>,
    stacks: Vec<Vec<usize>>,
    undo: Vec<(u32, UndoOp)>,
}

impl CoreRegistry {
    pub fn new(objective_vars: &[VarId], num_vars: usize) -> Self {
        CoreRegistry {
            records: Vec::new(),
            never_cored: objective_vars.iter().copied().collect(),
            counts: vec![0; num_vars],
            stacks: vec![Vec::new(); num_vars],
            undo: Vec::new(),
        }
    }

    pub fn active_count(&self, y: VarId) -> u32 {
        self.counts[y.index()]
    }

    /// Basic strategy: drop cored variables from the candidate set. Not
    /// trailed.
    pub fn remove_from_candidates(&mut self, members: &[VarId]) {
        for m in members {
            self.never_cored.remove(m);
        }
    }

    /// Register a core record as active; duplicates are kept (the registry
    /// is a multiset).
    pub fn register_core(
        &mut self,
        premises: Vec<Lit>,
        members: Vec<VarId>,
        level: u32,
        source: CoreSource,
    ) -> usize {
        debug_assert!(!members.is_empty());
        let idx = self.records.len();
        for &m in &members {
            self.counts[m.index()] += 1;
            self.stacks[m.index()].push(idx);
        }
        self.records.push(CoreRecord {
            members,
            premises,
            active: true,
            registered_level: level,
            source,
        });
        self.undo.push((level, UndoOp::Registered));
        idx
    }

    /// Algorithm hook for a relaxation literal turning true: every active
    /// record on its stack goes inactive. Returns the deactivated records.
    pub fn on_objective_literal_true(&mut self, y: VarId, level: u32) -> Vec<usize> {
        let mut out = Vec::new();
        let stack = self.stacks[y.index()].clone();
        for idx in stack {
            if self.records[idx].active {
                self.records[idx].active = false;
                let members = self.records[idx].members.clone();
                for m in members {
                    self.counts[m.index()] -= 1;
                }
                self.undo.push((level, UndoOp::Deactivated(idx)));
                out.push(idx);
            }
        }
        out
    }

    /// Revert all registrations and deactivations logged above `level`.
    pub fn undo_to(&mut self, level: u32) {
        while let Some(&(l, _)) = self.undo.last() {
            if l <= level {
                break;
            }
            match self.undo.pop().unwrap().1 {
                UndoOp::Registered => {
                    let rec = self.records.pop().unwrap();
                    // any deactivation of this record was logged later and has
                    // already been undone, so the record is active here
                    debug_assert!(rec.active);
                    let idx = self.records.len();
                    for m in rec.members {
                        self.counts[m.index()] -= 1;
                        debug_assert_eq!(self.stacks[m.index()].last().copied(), Some(idx));
                        self.stacks[m.index()].pop();
                    }
                }
                UndoOp::Deactivated(idx) => {
                    debug_assert!(!self.records[idx].active);
                    self.records[idx].active = true;
                    let members = self.records[idx].members.clone();
                    for m in members {
                        self.counts[m.index()] += 1;
                    }
                }
            }
        }
    }

    /// Candidate variables for a multiple decision: never-cored (basic) or
    /// zero active-core count (nested), restricted to unfixed variables by
    /// the caller. Ascending variable id.
    pub fn basic_candidates<'a>(
        &'a self,
        unfixed: impl Fn(VarId) -> bool + 'a,
    ) -> impl Iterator<Item = VarId> + 'a {
        self.never_cored.iter().copied().filter(move |&v| unfixed(v))
    }

    pub fn nested_candidates<'a>(
        &'a self,
        objective_vars: &'a [VarId],
        unfixed: impl Fn(VarId) -> bool + 'a,
    ) -> impl Iterator<Item = VarId> + 'a {
        objective_vars
            .iter()
            .copied()
            .filter(move |&v| self.counts[v.index()] == 0 && unfixed(v))
    }

    /// Indices of active records in registration order.
    pub fn active_records(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.records.len()).filter(|&i| self.records[i].active)
    }

    /// Recompute a count from scratch; debug oracle for the maintained one.
    pub fn recount(&self, y: VarId) -> u32 {
        self.records
            .iter()
            .filter(|r| r.active && r.members.contains(&y))
            .count() as u32
    }

    pub fn debug_check_counts(&self, num_vars: usize) -> bool {
        (0..num_vars).all(|i| self.counts[i] == self.recount(VarId(i as u32)))
    }

    pub fn grow(&mut self, num_vars: usize) {
        if num_vars > self.counts.len() {
            self.counts.resize(num_vars, 0);
            self.stacks.resize(num_vars, Vec::new());
        }
    }
}

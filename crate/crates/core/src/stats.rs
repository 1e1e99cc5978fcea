//! Solve statistics and the optional event trace.

use serde::Serialize;

use crate::domains::{Lit, VarId};

#[derive(Debug, Clone, Default, Serialize)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub multiple_decisions: u64,
    pub propagations: u64,
    pub cores_found: u64,
    pub cores_deactivated: u64,
    pub strengthenings: u64,
    pub lp_calls: u64,
    pub wall_ms: u64,
    /// Best lower bound established at the root, from strengthening or LP.
    pub root_lower_bound: u64,
    /// (conflicts, bound) whenever the root lower bound improves.
    pub lower_bound_trace: Vec<(u64, u64)>,
    pub first_incumbent_cost: Option<u64>,
    pub conflicts_to_first_incumbent: Option<u64>,
    /// (conflicts, cost) at each incumbent, in order.
    pub incumbent_trace: Vec<(u64, u64)>,
}

impl Stats {
    pub fn raise_root_lower_bound(&mut self, lb: u64) {
        if lb > self.root_lower_bound {
            self.root_lower_bound = lb;
            self.lower_bound_trace.push((self.conflicts, lb));
        }
    }
}

/// The deterministic part of the statistics (everything but wall time).
pub type SearchSignature = (u64, u64, u64, u64, u64, u64, u64, Vec<(u64, u64)>);

impl Stats {
    pub fn search_signature(&self) -> SearchSignature {
        (
            self.conflicts,
            self.decisions,
            self.multiple_decisions,
            self.propagations,
            self.cores_found,
            self.cores_deactivated,
            self.lp_calls,
            self.incumbent_trace.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoreSource {
    /// Generalized nogood from conflict analysis.
    Analysis,
    /// Notification from a split clause whose auxiliary literal fired.
    Notification,
    /// Clause over objective literals only, recognized when attached.
    Attach,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpExplKind {
    Fathom,
    Prune(Lit),
}

/// Events recorded when `SolverConfig::collect_events` is set.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverEvent {
    CoreFound {
        source: CoreSource,
        premises: Vec<Lit>,
        members: Vec<VarId>,
        level: u32,
        /// Strict objective upper bound in force when the core was found.
        upper: Option<u64>,
    },
    CoreDeactivated {
        members: Vec<VarId>,
    },
    MultipleDecision {
        level: u32,
        vars: Vec<VarId>,
    },
    Conflict {
        level: u32,
        /// True when the conflicting level was opened by a multiple decision.
        at_multiple_decision: bool,
        /// The variables decided at that level when it was a multiple decision.
        decision_vars: Vec<VarId>,
    },
    Incumbent {
        cost: u64,
        conflicts: u64,
    },
    LpExplanation {
        kind: LpExplKind,
        /// Conjunction of currently-true literals the inference cites.
        lits: Vec<Lit>,
        upper: Option<u64>,
    },
    Strengthened {
        coeffs: Vec<(VarId, u64)>,
        rhs: i128,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub enabled: bool,
    pub events: Vec<SolverEvent>,
}

impl Trace {
    pub fn push(&mut self, e: SolverEvent) {
        if self.enabled {
            self.events.push(e);
        }
    }

    pub fn cores(&self) -> impl Iterator<Item = &SolverEvent> {
        self.events.iter().filter(|e| matches!(e, SolverEvent::CoreFound { .. }))
    }
}

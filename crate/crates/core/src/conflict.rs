//! Conflict analysis: generalized 1UIP nogoods, backjump levels, and the
//! mode-dependent learning step.
//!
//! Analysis resolves the failure nogood against reasons at the conflict
//! level in reverse chronological order. It stops at a single conflict-level
//! literal (the 1UIP) or, at a multiple-decision level, when only decision
//! literals remain; the latter yields a nogood `L -> M` with several
//! conclusions, an unsatisfiable core over objective literals.

use std::collections::HashSet;

use crate::domains::{Lit, Reason, VarId};
use crate::propagation::Engine;
use crate::search::Mode;
use crate::stats::{CoreSource, SolverEvent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedNogood {
    /// L: conjunction of literals below the conflict level.
    pub premises: Vec<Lit>,
    /// M: disjunction of negations of the conflict-level literals.
    pub conclusions: Vec<Lit>,
    pub conflict_level: u32,
}

impl GeneralizedNogood {
    /// The clause `!L \/ M`.
    pub fn clause(&self) -> Vec<Lit> {
        let mut lits: Vec<Lit> = self.premises.iter().map(|l| l.negate()).collect();
        lits.extend(self.conclusions.iter().copied());
        lits
    }

    pub fn member_vars(&self) -> Vec<VarId> {
        let mut vs: Vec<VarId> = self.conclusions.iter().map(|l| l.var).collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

/// Max decision level among the premises, or 0 when there are none.
pub fn backjump_level(g: &GeneralizedNogood, engine: &Engine) -> u32 {
    g.premises.iter().map(|&l| engine.store.decision_level_of(l)).max().unwrap_or(0)
}

/// Resolve the failure nogood `n` against conflict-level reasons; collects
/// every variable touched into `touched` for activity bumping.
pub fn analyze(engine: &Engine, n: &[Lit], touched: &mut Vec<VarId>) -> GeneralizedNogood {
    debug_assert!(!n.is_empty());
    let store = &engine.store;
    let conflict_level = n.iter().map(|&l| store.decision_level_of(l)).max().unwrap();
    debug_assert!(conflict_level >= 1);
    let mut set: HashSet<Lit> = HashSet::new();
    let mut at_level = 0usize;
    for &l in n {
        touched.push(l.var);
        if set.insert(l) && store.decision_level_of(l) == conflict_level {
            at_level += 1;
        }
    }
    let start = store.level_start(conflict_level);
    let mut pos = store.trail.len();
    while at_level > 1 && pos > start {
        pos -= 1;
        let entry = store.entry(pos);
        if entry.level != conflict_level {
            continue;
        }
        if matches!(entry.reason, Reason::Decision | Reason::MultipleDecision) {
            continue;
        }
        if !set.contains(&entry.lit) {
            continue; // processed but not in N
        }
        set.remove(&entry.lit);
        at_level -= 1;
        touched.push(entry.lit.var);
        for r in engine.reason_lits(&entry.reason) {
            let lvl = store.decision_level_of(r);
            if lvl == 0 {
                continue;
            }
            touched.push(r.var);
            if set.insert(r) && lvl == conflict_level {
                at_level += 1;
            }
        }
    }
    let mut premises: Vec<Lit> = Vec::new();
    let mut conclusions: Vec<Lit> = Vec::new();
    for &l in &set {
        if store.decision_level_of(l) == conflict_level {
            conclusions.push(l.negate());
        } else {
            premises.push(l);
        }
    }
    premises.sort();
    conclusions.sort();
    let mut g = GeneralizedNogood { premises, conclusions, conflict_level };
    if g.conclusions.len() == 1 {
        minimize_premises(engine, &mut g);
    }
    touched.sort();
    touched.dedup();
    g
}

/// Self-subsumption on 1UIP clauses only: drop a premise whose own reason
/// is already contained in the premises. Generalized nogoods are left
/// untouched so no core member is lost.
fn minimize_premises(engine: &Engine, g: &mut GeneralizedNogood) {
    let store = &engine.store;
    loop {
        let lset: HashSet<Lit> = g.premises.iter().copied().collect();
        let mut removed = false;
        g.premises.retain(|&l| {
            let Some(p) = store.trail_pos(l) else { return true };
            let reason = &store.entry(p).reason;
            if matches!(reason, Reason::Decision | Reason::MultipleDecision) {
                return true;
            }
            let rs = engine.reason_lits(reason);
            let subsumed = !rs.is_empty()
                && rs
                    .iter()
                    .all(|r| store.decision_level_of(*r) == 0 || lset.contains(r));
            if subsumed {
                removed = true;
            }
            !subsumed
        });
        if !removed {
            break;
        }
    }
}

/// Algorithm's learning step after backjumping.
///
/// A single conclusion is learnt as a clause that asserts its literal. A
/// wider nogood is handled per mode: basic shrinks the candidate set,
/// nested registers an active core record, and notification mode learns
/// the clause as well (attached in notify mode, so the registration comes
/// from its own activation).
pub fn learn(engine: &mut Engine, g: &GeneralizedNogood, mode: Mode) {
    if g.conclusions.len() == 1 {
        engine.attach_clause(g.clause(), true, mode == Mode::NestedNotify);
        return;
    }
    match mode {
        Mode::Bb => unreachable!("multiple decisions never occur in plain branch and bound"),
        Mode::Basic => {
            let members = g.member_vars();
            engine.registry.remove_from_candidates(&members);
            engine.stats.cores_found += 1;
            engine.trace.push(SolverEvent::CoreFound {
                source: CoreSource::Analysis,
                premises: g.premises.clone(),
                members,
                level: engine.current_level(),
                upper: engine.bound.upper,
            });
        }
        Mode::Nested => {
            engine.register_core_from_analysis(g.premises.clone(), g.member_vars());
        }
        Mode::NestedNotify => {
            // safe to learn every analysis clause; splitting raises the
            // activation which registers the core exactly once
            engine.attach_clause(g.clause(), true, true);
        }
    }
}

//! End-to-end traces on the small instances the solver is calibrated
//! against, with the objective variables taking part in the hard clauses
//! directly.

use coropt_core::model::{BLit, Constraint, Problem};
use coropt_core::search::{Mode, Solver, SolverConfig};
use coropt_core::stats::{CoreSource, SolverEvent};
use coropt_core::{Bounding, VarId};

/// minimize a+b+c subject to a|b|d, b|c|!d, !a|d.
fn nesting_problem() -> Problem {
    let mut p = Problem::new();
    let a = p.add_bool_var("a");
    let b = p.add_bool_var("b");
    let c = p.add_bool_var("c");
    let d = p.add_bool_var("d");
    p.add_hard(Constraint::Clause(vec![BLit::pos(a), BLit::pos(b), BLit::pos(d)]));
    p.add_hard(Constraint::Clause(vec![BLit::pos(b), BLit::pos(c), BLit::neg(d)]));
    p.add_hard(Constraint::Clause(vec![BLit::neg(a), BLit::pos(d)]));
    p.add_objective_term(a, 1).unwrap();
    p.add_objective_term(b, 1).unwrap();
    p.add_objective_term(c, 1).unwrap();
    p
}

fn cfg(mode: Mode) -> SolverConfig {
    SolverConfig {
        mode,
        bounding: Bounding::Std,
        collect_events: true,
        // programmed search: try a = true first, as in the worked trace
        polarity_hints: vec![("a".into(), true)],
        ..SolverConfig::default()
    }
}

fn core_events(trace: &coropt_core::Trace) -> Vec<(Vec<VarId>, Vec<coropt_core::Lit>, CoreSource)> {
    trace
        .events
        .iter()
        .filter_map(|e| match e {
            SolverEvent::CoreFound { members, premises, source, .. } => {
                Some((members.clone(), premises.clone(), *source))
            }
            _ => None,
        })
        .collect()
}

#[test]
fn nested_trace_discovers_root_and_contingent_cores() {
    let p = nesting_problem();
    let (a, b, c, d) = (VarId(0), VarId(1), VarId(2), VarId(3));
    let mut s = Solver::new(p, cfg(Mode::Nested));
    let out = s.solve();
    // the instance's true optimum is 1 (b alone satisfies every clause)
    assert_eq!(out.optimal_cost(), Some(1));
    // the first descent ends at the cost-2 solution with a true
    assert_eq!(s.stats().first_incumbent_cost, Some(2));
    let cores = core_events(s.trace());
    assert!(cores.len() >= 2);
    assert_eq!(cores[0].0, vec![a, b, c]);
    assert!(cores[0].1.is_empty());
    assert_eq!(cores[1].0, vec![b, c]);
    assert_eq!(cores[1].1, vec![coropt_core::Lit::pos(d)]);
    // the contingent core came out of a failed multiple decision on {b,c}
    let failed_md = s.trace().events.iter().any(|e| {
        matches!(e, SolverEvent::Conflict { at_multiple_decision: true, decision_vars, .. }
            if decision_vars == &vec![b, c])
    });
    assert!(failed_md);
}

#[test]
fn notification_avoids_the_failed_multiple_decision() {
    let p = nesting_problem();
    let (a, b, c, d) = (VarId(0), VarId(1), VarId(2), VarId(3));
    let mut s = Solver::new(p, cfg(Mode::NestedNotify));
    let out = s.solve();
    assert_eq!(out.optimal_cost(), Some(1));
    assert_eq!(s.stats().first_incumbent_cost, Some(2));
    // the original clause b|c|!d activates as a core once d turns true
    let cores = core_events(s.trace());
    assert!(cores
        .iter()
        .any(|(m, pr, src)| m == &vec![b, c]
            && pr == &vec![coropt_core::Lit::pos(d)]
            && *src == CoreSource::Notification));
    // the root core is still derived by analysis first
    assert_eq!(cores[0].0, vec![a, b, c]);
    // and the failed multiple decision b=c=false never occurs
    let failed_md = s.trace().events.iter().any(|e| {
        matches!(e, SolverEvent::Conflict { at_multiple_decision: true, decision_vars, .. }
            if decision_vars == &vec![b, c])
    });
    assert!(!failed_md, "notification must avoid the failed multiple decision");
}

#[test]
fn direct_objective_oracle_agreement() {
    let p = nesting_problem();
    match coropt_core::model::brute_force_optimum(&p, 1 << 24).unwrap() {
        coropt_core::model::OracleOutcome::Optimal { cost, .. } => assert_eq!(cost, 1),
        other => panic!("{other:?}"),
    }
}

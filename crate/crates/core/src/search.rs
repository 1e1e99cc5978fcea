//! Branch-and-bound search loop with clause learning, multiple decisions
//! and incumbent-driven objective tightening.
//!
//! On every conflict the failure nogood is analyzed; a wide nogood feeds
//! the core machinery of the configured mode. A solution restarts search
//! at the root with the objective constraint tightened below the incumbent
//! cost, so a level-0 conflict proves optimality (or infeasibility when no
//! incumbent exists).

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounding::{BoundManager, Bounding};
use crate::conflict::{analyze, backjump_level, learn};
use crate::cores::CoreRegistry;
use crate::domains::{Lit, VarId};
use crate::model::{self, Constraint, LinRel, Problem};
use crate::propagation::{Engine, PropResult};
use crate::stats::{SolverEvent, Stats, Trace};

pub use crate::bounding::Bounding as BoundingMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Mode {
    Bb,
    Basic,
    Nested,
    NestedNotify,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: Mode,
    pub bounding: Bounding,
    pub time_limit: Option<f64>,
    pub conflict_limit: Option<u64>,
    pub seed: u64,
    pub vsids_decay: f64,
    pub collect_events: bool,
    /// Randomized tie-break between equal-activity variables (off by
    /// default; the seed has no other effect).
    pub randomize_ties: bool,
    /// Preferred first branch per variable name; part of the programmed
    /// search, applied to Boolean variables.
    pub polarity_hints: Vec<(String, bool)>,
    pub clause_db_cap: usize,
    /// Where the CLI writes the statistics object after solving.
    pub stats_sink: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::Bb,
            bounding: Bounding::Std,
            time_limit: None,
            conflict_limit: None,
            seed: 0,
            vsids_decay: 0.95,
            collect_events: false,
            randomize_ties: false,
            polarity_hints: Vec::new(),
            clause_db_cap: 10_000,
            stats_sink: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incumbent {
    /// Values of the problem variables, in declaration order.
    pub assignment: Vec<i64>,
    pub cost: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitReason {
    Timeout,
    ConflictLimit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Optimal(Incumbent),
    Infeasible,
    Bound { incumbent: Option<Incumbent>, reason: LimitReason },
}

impl Outcome {
    pub fn optimal_cost(&self) -> Option<u64> {
        match self {
            Outcome::Optimal(i) => Some(i.cost),
            _ => None,
        }
    }
}

struct Vsids {
    act: Vec<f64>,
    inc: f64,
    decay: f64,
}

impl Vsids {
    fn new(n: usize, decay: f64) -> Vsids {
        Vsids { act: vec![0.0; n], inc: 1.0, decay }
    }

    fn bump(&mut self, v: VarId) {
        if v.index() >= self.act.len() {
            self.act.resize(v.index() + 1, 0.0);
        }
        self.act[v.index()] += self.inc;
        if self.act[v.index()] > 1e100 {
            for a in self.act.iter_mut() {
                *a *= 1e-100;
            }
            self.inc *= 1e-100;
        }
    }

    fn decay(&mut self) {
        self.inc /= self.decay;
    }

    fn activity(&self, v: VarId) -> f64 {
        self.act.get(v.index()).copied().unwrap_or(0.0)
    }
}

enum Decision {
    Multiple(Vec<VarId>),
    Single(Lit),
    NoUnfixed,
}

pub struct Solver {
    pub engine: Engine,
    cfg: SolverConfig,
    problem: Problem,
    obj_vars: Vec<VarId>,
    vsids: Vsids,
    hints: HashMap<u32, bool>,
    incumbent: Option<Incumbent>,
    rng: ChaCha8Rng,
    num_problem_vars: usize,
    cancel: Arc<AtomicBool>,
}

impl Solver {
    pub fn new(problem: Problem, cfg: SolverConfig) -> Solver {
        let nvars = problem.vars.len();
        let obj_pairs: Vec<(u64, VarId)> =
            problem.objective.iter().map(|&(w, v)| (w, VarId(v as u32))).collect();
        let mut obj_vars: Vec<VarId> = obj_pairs.iter().map(|&(_, v)| v).collect();
        obj_vars.sort();
        obj_vars.dedup();
        let bound = BoundManager::new(cfg.bounding, &obj_pairs, nvars);
        let registry = CoreRegistry::new(&obj_vars, nvars);
        let notify = cfg.mode == Mode::NestedNotify;
        let mut engine = Engine::new(bound, registry, notify);
        engine.trace.enabled = cfg.collect_events;
        for d in &problem.vars {
            let is_obj = obj_vars.binary_search(&VarId(engine.store.num_vars() as u32)).is_ok();
            engine.new_var(d.lo, d.hi, is_obj, false);
        }
        for c in &problem.hard {
            post_constraint(&mut engine, c, notify);
        }
        let hints = cfg
            .polarity_hints
            .iter()
            .filter_map(|(name, pol)| {
                problem.vars.iter().position(|d| &d.name == name).map(|i| (i as u32, *pol))
            })
            .collect();
        let vsids = Vsids::new(nvars, cfg.vsids_decay);
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Solver {
            engine,
            cfg,
            num_problem_vars: nvars,
            problem,
            obj_vars,
            vsids,
            hints,
            incumbent: None,
            rng,
            cancel: Arc::new(AtomicBool::new(false)),
        }
    }

    /// Flag checked at every conflict; setting it from another thread makes
    /// solve return with the best incumbent so far.
    pub fn cancel_handle(&self) -> Arc<AtomicBool> {
        self.cancel.clone()
    }

    pub fn stats(&self) -> &Stats {
        &self.engine.stats
    }

    pub fn trace(&self) -> &Trace {
        &self.engine.trace
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn solve(&mut self) -> Outcome {
        let started = Instant::now();
        let out = self.run(started);
        self.engine.stats.wall_ms = started.elapsed().as_millis() as u64;
        out
    }

    fn time_up(&self, started: Instant) -> bool {
        match self.cfg.time_limit {
            Some(t) => started.elapsed().as_secs_f64() >= t,
            None => false,
        }
    }

    fn run(&mut self, started: Instant) -> Outcome {
        if self.time_up(started) {
            return Outcome::Bound { incumbent: self.incumbent.clone(), reason: LimitReason::Timeout };
        }
        loop {
            if self.engine.root_infeasible {
                return match self.incumbent.take() {
                    Some(inc) => Outcome::Optimal(inc),
                    None => Outcome::Infeasible,
                };
            }
            match self.engine.propagate() {
                PropResult::Conflict(n) => {
                    self.engine.stats.conflicts += 1;
                    if self.engine.trace.enabled {
                        let level = self.engine.current_level();
                        let (at_md, dvars) = self
                            .engine
                            .level_decisions
                            .last()
                            .cloned()
                            .unwrap_or((false, Vec::new()));
                        self.engine.trace.push(SolverEvent::Conflict {
                            level,
                            at_multiple_decision: at_md,
                            decision_vars: dvars,
                        });
                    }
                    if n.is_empty() {
                        return match self.incumbent.take() {
                            Some(inc) => Outcome::Optimal(inc),
                            None => Outcome::Infeasible,
                        };
                    }
                    if self.cancel.load(Ordering::Relaxed) || self.time_up(started) {
                        return Outcome::Bound {
                            incumbent: self.incumbent.clone(),
                            reason: LimitReason::Timeout,
                        };
                    }
                    if let Some(cl) = self.cfg.conflict_limit {
                        if self.engine.stats.conflicts > cl {
                            return Outcome::Bound {
                                incumbent: self.incumbent.clone(),
                                reason: LimitReason::ConflictLimit,
                            };
                        }
                    }
                    let mut touched = Vec::new();
                    let g = analyze(&self.engine, &n, &mut touched);
                    for v in touched {
                        self.vsids.bump(v);
                    }
                    self.vsids.decay();
                    let bl = backjump_level(&g, &self.engine);
                    self.engine.backjump(bl);
                    learn(&mut self.engine, &g, self.cfg.mode);
                    self.engine.reduce_db(self.cfg.clause_db_cap);
                }
                PropResult::Fixpoint => {
                    if self.engine.all_problem_vars_fixed() {
                        self.record_incumbent();
                        continue;
                    }
                    match self.decide() {
                        Decision::Multiple(vars) => {
                            self.engine.decide_multiple(&vars);
                        }
                        Decision::Single(lit) => {
                            self.engine.decide_single(lit);
                        }
                        Decision::NoUnfixed => {
                            unreachable!("unfixed problem variable must exist at a fixpoint")
                        }
                    }
                }
            }
        }
    }

    fn record_incumbent(&mut self) {
        let mut assignment: Vec<i64> = (0..self.num_problem_vars)
            .map(|i| self.engine.store.fixed_value(VarId(i as u32)).expect("fixed"))
            .collect();
        // Relaxation variables may be true gratuitously; canonicalize them
        // to the violation indicator, which can only lower the cost.
        for s in &self.problem.softs {
            assignment[s.relax_var] =
                if model::eval_constraint(&s.inner, &assignment) { 0 } else { 1 };
        }
        let cost: u64 = self
            .problem
            .objective
            .iter()
            .map(|&(w, v)| if assignment[v] == 1 { w } else { 0 })
            .sum();
        // re-check independently of the propagators
        assert!(
            model::satisfies_hard(&self.problem, &assignment),
            "incumbent violates a hard constraint"
        );
        assert_eq!(cost, model::cost_of(&self.problem, &assignment));
        if let Some(prev) = &self.incumbent {
            assert!(cost < prev.cost, "incumbent costs must strictly decrease");
        }
        let stats = &mut self.engine.stats;
        if stats.first_incumbent_cost.is_none() {
            stats.first_incumbent_cost = Some(cost);
            stats.conflicts_to_first_incumbent = Some(stats.conflicts);
        }
        let conflicts = stats.conflicts;
        stats.incumbent_trace.push((conflicts, cost));
        self.engine.trace.push(SolverEvent::Incumbent { cost, conflicts });
        self.incumbent = Some(Incumbent { assignment, cost });
        self.post_incumbent(cost);
    }

    /// Restart at the root and post the tightened objective constraint
    /// `c^T y < cost`; the bounding module rebuilds its strengthened form.
    fn post_incumbent(&mut self, cost: u64) {
        self.engine.backjump(0);
        let e = &mut self.engine;
        e.bound.set_incumbent(cost, &e.registry, &mut e.stats, &mut e.trace);
        e.bound.dirty = true;
        e.bound.lp_dirty = true;
    }

    fn decide(&mut self) -> Decision {
        let store = &self.engine.store;
        if self.cfg.mode != Mode::Bb {
            let unfixed = |v: VarId| !store.is_fixed(v);
            let cands: Vec<VarId> = match self.cfg.mode {
                Mode::Basic => {
                    if self.engine.current_level() == 0 {
                        self.engine.registry.basic_candidates(unfixed).collect()
                    } else {
                        Vec::new()
                    }
                }
                Mode::Nested | Mode::NestedNotify => {
                    self.engine.registry.nested_candidates(&self.obj_vars, unfixed).collect()
                }
                Mode::Bb => unreachable!(),
            };
            if !cands.is_empty() {
                return Decision::Multiple(cands);
            }
        }
        // activity-based single decision over the problem variables
        let mut best: Option<(f64, VarId)> = None;
        let mut ties: Vec<VarId> = Vec::new();
        for i in 0..self.num_problem_vars {
            let v = VarId(i as u32);
            if self.engine.store.is_fixed(v) {
                continue;
            }
            let a = self.vsids.activity(v);
            match &best {
                None => {
                    best = Some((a, v));
                    ties = vec![v];
                }
                Some((ba, _)) if a > *ba => {
                    best = Some((a, v));
                    ties = vec![v];
                }
                Some((ba, _)) if a == *ba => ties.push(v),
                _ => {}
            }
        }
        let Some((_, mut var)) = best else {
            return Decision::NoUnfixed;
        };
        if self.cfg.randomize_ties && ties.len() > 1 {
            var = *ties.choose(&mut self.rng).unwrap();
        }
        let lo = self.engine.store.lo(var);
        let hi = self.engine.store.hi(var);
        let lit = if lo == 0 && hi == 1 {
            match self.hints.get(&var.0) {
                Some(true) => Lit::pos(var),
                Some(false) => Lit::neg_bool(var),
                // objective variables branch false first; other Booleans
                // take the lower half like any integer
                None => Lit::neg_bool(var),
            }
        } else {
            Lit::leq(var, lo + (hi - lo) / 2)
        };
        Decision::Single(lit)
    }
}

fn post_constraint(engine: &mut Engine, c: &Constraint, notify: bool) {
    match c {
        Constraint::Clause(lits) => {
            let ls: Vec<Lit> =
                lits.iter().map(|l| Lit::bool_lit(VarId(l.var as u32), l.positive)).collect();
            engine.attach_clause(ls, false, notify);
        }
        Constraint::Linear { terms, rel, bound } => {
            let ts: Vec<(i64, VarId)> =
                terms.iter().map(|&(c, v)| (c, VarId(v as u32))).collect();
            post_linear_rel(engine, &ts, *rel, *bound, None);
        }
        Constraint::HalfReified { guard, inner } => {
            let g = Lit::bool_lit(VarId(guard.var as u32), guard.positive);
            match inner.as_ref() {
                Constraint::Clause(lits) => {
                    let mut ls: Vec<Lit> = vec![g.negate()];
                    ls.extend(
                        lits.iter().map(|l| Lit::bool_lit(VarId(l.var as u32), l.positive)),
                    );
                    engine.attach_clause(ls, false, notify);
                }
                Constraint::Linear { terms, rel, bound } => {
                    let ts: Vec<(i64, VarId)> =
                        terms.iter().map(|&(c, v)| (c, VarId(v as u32))).collect();
                    post_linear_rel(engine, &ts, *rel, *bound, Some(g));
                }
                Constraint::HalfReified { .. } => {
                    unreachable!("nested half-reification is not constructible from the parsers")
                }
            }
        }
    }
}

fn post_linear_rel(
    engine: &mut Engine,
    terms: &[(i64, VarId)],
    rel: LinRel,
    bound: i64,
    guard: Option<Lit>,
) {
    match rel {
        LinRel::Le => engine.post_linear(terms.to_vec(), bound as i128, guard),
        LinRel::Ge => {
            let neg: Vec<(i64, VarId)> = terms.iter().map(|&(c, v)| (-c, v)).collect();
            engine.post_linear(neg, -(bound as i128), guard);
        }
        LinRel::Eq => {
            engine.post_linear(terms.to_vec(), bound as i128, guard);
            let neg: Vec<(i64, VarId)> = terms.iter().map(|&(c, v)| (-c, v)).collect();
            engine.post_linear(neg, -(bound as i128), guard);
        }
    }
}

/// Convenience entry point: build a solver and run it.
pub fn solve(problem: &Problem, cfg: &SolverConfig) -> (Outcome, Stats, Trace) {
    let mut s = Solver::new(problem.clone(), cfg.clone());
    let outcome = s.solve();
    let stats = s.engine.stats.clone();
    let trace = s.engine.trace.clone();
    (outcome, stats, trace)
}

pub const ALL_MODES: [Mode; 4] = [Mode::Bb, Mode::Basic, Mode::Nested, Mode::NestedNotify];
pub const ALL_BOUNDINGS: [Bounding; 3] = [Bounding::Std, Bounding::Disjoint, Bounding::Lp];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_native, parse_wcnf};

    const EXAMPLE1: &str = "p wcnf 2 4 5\n1 -2 0\n1 1 2 0\n1 -1 0\n1 1 0\n";
    const EXAMPLE2: &str = "p wcnf 3 4 5\n1 -1 0\n1 -2 0\n1 1 2 0\n1 -3 0\n";

    fn cfg(mode: Mode, bounding: Bounding) -> SolverConfig {
        SolverConfig { mode, bounding, collect_events: true, ..SolverConfig::default() }
    }

    #[test]
    fn four_soft_instance_all_modes_cost_one() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        for mode in ALL_MODES {
            for bounding in ALL_BOUNDINGS {
                let (out, _, _) = solve(&p, &cfg(mode, bounding));
                assert_eq!(out.optimal_cost(), Some(1), "{mode:?} {bounding:?}");
            }
        }
    }

    #[test]
    fn basic_mode_first_core_is_y3_y4() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        let (out, _, trace) = solve(&p, &cfg(Mode::Basic, Bounding::Std));
        assert_eq!(out.optimal_cost(), Some(1));
        let first = trace
            .cores()
            .next()
            .expect("a core must be found");
        match first {
            SolverEvent::CoreFound { members, premises, .. } => {
                // relax vars of softs 3 and 4 are problem vars 4 and 5
                assert_eq!(members, &vec![VarId(4), VarId(5)]);
                assert!(premises.is_empty());
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn second_instance_single_core_and_immediate_optimality() {
        let p = parse_wcnf(EXAMPLE2).unwrap();
        for bounding in [Bounding::Std, Bounding::Disjoint] {
            let (out, stats, trace) = solve(&p, &cfg(Mode::Basic, bounding));
            assert_eq!(out.optimal_cost(), Some(1));
            let cores: Vec<_> = trace.cores().collect();
            assert_eq!(cores.len(), 1, "only one core: {bounding:?}");
            match cores[0] {
                SolverEvent::CoreFound { members, .. } => {
                    assert_eq!(members, &vec![VarId(3), VarId(4), VarId(5)]);
                }
                _ => unreachable!(),
            }
            // first incumbent is already the optimum; no further incumbents
            assert_eq!(stats.incumbent_trace.len(), 1);
            assert_eq!(stats.first_incumbent_cost, Some(1));
        }
    }

    #[test]
    fn infeasible_hard_instance() {
        let p = parse_native("bool a\nclause a\nclause -a\n").unwrap();
        for mode in ALL_MODES {
            let (out, _, _) = solve(&p, &cfg(mode, Bounding::Std));
            assert_eq!(out, Outcome::Infeasible);
        }
    }

    #[test]
    fn integer_instance_with_soft_linear() {
        let p = parse_native("int x 1 3\nsoft 2 linear x <= 1\nlinear x >= 2\n").unwrap();
        for mode in ALL_MODES {
            for bounding in ALL_BOUNDINGS {
                let (out, _, _) = solve(&p, &cfg(mode, bounding));
                assert_eq!(out.optimal_cost(), Some(2), "{mode:?} {bounding:?}");
            }
        }
    }

    #[test]
    fn nesting_instance_finds_cost_one_everywhere() {
        let text = "bool a\nbool b\nbool c\nbool d\n\
clause a b d\nclause b c -d\nclause -a d\n\
soft 1 clause -a\nsoft 1 clause -b\nsoft 1 clause -c\n";
        let p = parse_native(text).unwrap();
        for mode in ALL_MODES {
            for bounding in ALL_BOUNDINGS {
                let (out, _, _) = solve(&p, &cfg(mode, bounding));
                assert_eq!(out.optimal_cost(), Some(1), "{mode:?} {bounding:?}");
            }
        }
    }

    #[test]
    fn determinism_identical_stats() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        for mode in ALL_MODES {
            let c = cfg(mode, Bounding::Disjoint);
            let (o1, s1, _) = solve(&p, &c);
            let (o2, s2, _) = solve(&p, &c);
            assert_eq!(o1, o2);
            assert_eq!(s1.search_signature(), s2.search_signature());
        }
    }

    #[test]
    fn bb_mode_never_touches_the_registry() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        let mut s = Solver::new(p, cfg(Mode::Bb, Bounding::Std));
        let out = s.solve();
        assert_eq!(out.optimal_cost(), Some(1));
        assert!(s.engine.registry.records.is_empty());
        assert_eq!(s.engine.stats.cores_found, 0);
        assert_eq!(s.engine.stats.multiple_decisions, 0);
    }

    #[test]
    fn zero_time_limit_returns_unknown() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        let c = SolverConfig { time_limit: Some(0.0), ..cfg(Mode::Basic, Bounding::Std) };
        let (out, _, _) = solve(&p, &c);
        assert_eq!(
            out,
            Outcome::Bound { incumbent: None, reason: LimitReason::Timeout }
        );
    }

    #[test]
    fn hard_only_instance_is_optimal_at_zero() {
        // a cost-0 incumbent tightens the bound below zero, so the next
        // root propagation proves optimality
        let p = parse_native("bool a\nbool b\nclause a b\n").unwrap();
        let (out, stats, _) = solve(&p, &cfg(Mode::Nested, Bounding::Disjoint));
        assert_eq!(out.optimal_cost(), Some(0));
        assert_eq!(stats.incumbent_trace.len(), 1);
    }

    #[test]
    fn cancellation_flag_stops_at_a_conflict() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        let mut s = Solver::new(p, cfg(Mode::Basic, Bounding::Std));
        s.cancel_handle().store(true, std::sync::atomic::Ordering::Relaxed);
        match s.solve() {
            Outcome::Bound { reason: LimitReason::Timeout, .. } => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn randomized_tie_break_is_seed_deterministic_and_sound() {
        let p = parse_wcnf(EXAMPLE1).unwrap();
        for seed in [1u64, 2, 3] {
            let c = SolverConfig {
                randomize_ties: true,
                seed,
                ..cfg(Mode::Nested, Bounding::Std)
            };
            let (o1, s1, _) = solve(&p, &c);
            let (o2, s2, _) = solve(&p, &c);
            assert_eq!(o1.optimal_cost(), Some(1));
            assert_eq!(o1, o2);
            assert_eq!(s1.search_signature(), s2.search_signature());
        }
    }

    #[test]
    fn incumbent_costs_strictly_decrease() {
        let p = parse_wcnf(
            "p wcnf 4 6 50\n3 1 2 0\n2 -1 3 0\n4 -2 -3 0\n1 4 0\n2 -4 1 0\n5 2 4 0\n",
        )
        .unwrap();
        for mode in ALL_MODES {
            let (_, stats, _) = solve(&p, &cfg(mode, Bounding::Std));
            let costs: Vec<u64> = stats.incumbent_trace.iter().map(|&(_, c)| c).collect();
            assert!(costs.windows(2).all(|w| w[1] < w[0]), "{mode:?}: {costs:?}");
        }
    }
}

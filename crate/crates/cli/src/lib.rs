//! Library behind the `coropt` binary: solve with MAXSAT-convention
//! output, the multi-configuration verifier, and the benchmark runner.

pub mod gen;

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use coropt_core::model::{
    brute_force_optimum, cost_of, eval_constraint, parse_native, parse_wcnf, satisfies_hard,
    OracleOutcome, Problem, VarKind, DEFAULT_SPACE_CAP,
};
use coropt_core::search::{solve, ALL_BOUNDINGS, ALL_MODES};
use coropt_core::{Bounding, Mode, Outcome, SolverConfig, Stats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Wcnf,
    Cop,
    Auto,
}

pub fn detect_format(path: &str, text: &str, requested: Format) -> Format {
    match requested {
        Format::Auto => {
            let p = path.to_ascii_lowercase();
            if p.ends_with(".wcnf") || p.ends_with(".cnf") {
                return Format::Wcnf;
            }
            if p.ends_with(".cop") {
                return Format::Cop;
            }
            let first = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'));
            match first {
                Some(l) if l.starts_with("p ") => Format::Wcnf,
                _ => Format::Cop,
            }
        }
        other => other,
    }
}

pub fn parse_instance(text: &str, format: Format, path: &str) -> Result<Problem, String> {
    match detect_format(path, text, format) {
        Format::Wcnf => parse_wcnf(text).map_err(|e| e.to_string()),
        Format::Cop | Format::Auto => parse_native(text).map_err(|e| e.to_string()),
    }
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "bb" => Ok(Mode::Bb),
        "basic" => Ok(Mode::Basic),
        "nested" => Ok(Mode::Nested),
        "nested-notify" => Ok(Mode::NestedNotify),
        other => Err(format!("unknown mode `{other}`")),
    }
}

pub fn parse_bounding(s: &str) -> Result<Bounding, String> {
    match s {
        "std" => Ok(Bounding::Std),
        "disjoint" => Ok(Bounding::Disjoint),
        "lp" => Ok(Bounding::Lp),
        other => Err(format!("unknown bounding `{other}`")),
    }
}

pub fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Bb => "bb",
        Mode::Basic => "basic",
        Mode::Nested => "nested",
        Mode::NestedNotify => "nested-notify",
    }
}

pub fn bounding_name(b: Bounding) -> &'static str {
    match b {
        Bounding::Std => "std",
        Bounding::Disjoint => "disjoint",
        Bounding::Lp => "lp",
    }
}

/// Render the assignment for the `v` line: DIMACS signed literals for WCNF
/// instances, `name=value` pairs for native ones.
pub fn format_v_line(p: &Problem, assignment: &[i64], format: Format) -> String {
    let mut s = String::from("v");
    match format {
        Format::Wcnf => {
            for (i, d) in p.vars.iter().enumerate() {
                if matches!(d.kind, VarKind::Relax(_)) {
                    continue;
                }
                let lit = (i + 1) as i64;
                let _ = write!(s, " {}", if assignment[i] == 1 { lit } else { -lit });
            }
        }
        _ => {
            for (i, d) in p.vars.iter().enumerate() {
                if matches!(d.kind, VarKind::Relax(_)) {
                    continue;
                }
                let _ = write!(s, " {}={}", d.name, assignment[i]);
            }
        }
    }
    s
}

/// Independent checker for a printed `v` line: re-evaluates every hard
/// constraint and recomputes the cost with relaxation variables completed
/// minimally.
pub fn check_v_line(
    p: &Problem,
    vline: &str,
    expected_cost: u64,
    format: Format,
) -> Result<(), String> {
    let toks: Vec<&str> = vline.split_whitespace().collect();
    if toks.first() != Some(&"v") {
        return Err("not a v line".into());
    }
    let mut theta: Vec<i64> = p.vars.iter().map(|d| d.lo).collect();
    match format {
        Format::Wcnf => {
            for t in &toks[1..] {
                let l: i64 = t.parse().map_err(|_| format!("bad literal `{t}`"))?;
                let idx = (l.unsigned_abs() - 1) as usize;
                if idx >= p.vars.len() {
                    return Err(format!("literal {l} out of range"));
                }
                theta[idx] = if l > 0 { 1 } else { 0 };
            }
        }
        _ => {
            let by_name: HashMap<&str, usize> =
                p.vars.iter().enumerate().map(|(i, d)| (d.name.as_str(), i)).collect();
            for t in &toks[1..] {
                let (name, val) =
                    t.split_once('=').ok_or_else(|| format!("bad assignment `{t}`"))?;
                let &idx = by_name.get(name).ok_or_else(|| format!("unknown var `{name}`"))?;
                theta[idx] = val.parse().map_err(|_| format!("bad value `{val}`"))?;
            }
        }
    }
    for s in &p.softs {
        theta[s.relax_var] = if eval_constraint(&s.inner, &theta) { 0 } else { 1 };
    }
    if !satisfies_hard(p, &theta) {
        return Err("assignment violates a hard constraint".into());
    }
    let cost = cost_of(p, &theta);
    if cost != expected_cost {
        return Err(format!("cost {cost} does not match reported {expected_cost}"));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub status: String,
    pub cost: Option<u64>,
    pub stats: Stats,
}

/// Solve one instance and print MAXSAT-convention output. Returns the
/// process exit code: 0 optimum, 10 unsatisfiable, 20 satisfiable (limit
/// hit with an incumbent), 30 unknown.
pub fn run_solve(
    text: &str,
    path: &str,
    format: Format,
    cfg: &SolverConfig,
    out: &mut impl std::io::Write,
) -> Result<i32, String> {
    let fmt = detect_format(path, text, format);
    let p = parse_instance(text, fmt, path)?;
    writeln!(out, "c instance {path}").ok();
    writeln!(out, "c mode {} bounding {}", mode_name(cfg.mode), bounding_name(cfg.bounding)).ok();
    let (outcome, stats, _) = solve(&p, cfg);
    for &(_, cost) in &stats.incumbent_trace {
        writeln!(out, "o {cost}").ok();
    }
    if let Some(sink) = &cfg.stats_sink {
        let report = SolveReport {
            status: match &outcome {
                Outcome::Optimal(_) => "OPTIMUM FOUND".into(),
                Outcome::Infeasible => "UNSATISFIABLE".into(),
                Outcome::Bound { incumbent: Some(_), .. } => "SATISFIABLE".into(),
                Outcome::Bound { incumbent: None, .. } => "UNKNOWN".into(),
            },
            cost: match &outcome {
                Outcome::Optimal(i) => Some(i.cost),
                Outcome::Bound { incumbent: Some(i), .. } => Some(i.cost),
                _ => None,
            },
            stats: stats.clone(),
        };
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        std::fs::write(sink, json).map_err(|e| e.to_string())?;
    }
    let code = match &outcome {
        Outcome::Optimal(inc) => {
            writeln!(out, "s OPTIMUM FOUND").ok();
            writeln!(out, "{}", format_v_line(&p, &inc.assignment, fmt)).ok();
            0
        }
        Outcome::Infeasible => {
            writeln!(out, "s UNSATISFIABLE").ok();
            10
        }
        Outcome::Bound { incumbent: Some(inc), .. } => {
            writeln!(out, "s SATISFIABLE").ok();
            writeln!(out, "{}", format_v_line(&p, &inc.assignment, fmt)).ok();
            20
        }
        Outcome::Bound { incumbent: None, .. } => {
            writeln!(out, "s UNKNOWN").ok();
            30
        }
    };
    Ok(code)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Everything agreed; carries the agreed optimum (None = infeasible).
    Agree(Option<u64>),
    Disagree(String),
    CapExceeded,
}

/// Run every mode/bounding combination plus the oracle on one instance.
pub fn verify_instance(p: &Problem, seed: u64) -> VerifyOutcome {
    let oracle = match brute_force_optimum(p, DEFAULT_SPACE_CAP) {
        Ok(o) => o,
        Err(_) => return VerifyOutcome::CapExceeded,
    };
    let expected = match &oracle {
        OracleOutcome::Optimal { cost, .. } => Some(*cost),
        OracleOutcome::Infeasible => None,
    };
    let mut table = String::new();
    let mut agree = true;
    for mode in ALL_MODES {
        for bounding in ALL_BOUNDINGS {
            let cfg = SolverConfig { mode, bounding, seed, ..SolverConfig::default() };
            let (out, _, _) = solve(p, &cfg);
            let got = match &out {
                Outcome::Optimal(i) => Some(i.cost),
                Outcome::Infeasible => None,
                other => {
                    agree = false;
                    let _ = writeln!(
                        table,
                        "{}/{}: unexpected {:?}",
                        mode_name(mode),
                        bounding_name(bounding),
                        other
                    );
                    continue;
                }
            };
            if got != expected {
                agree = false;
                let _ = writeln!(
                    table,
                    "{}/{}: got {:?}, oracle {:?}",
                    mode_name(mode),
                    bounding_name(bounding),
                    got,
                    expected
                );
            }
        }
    }
    if agree {
        VerifyOutcome::Agree(expected)
    } else {
        VerifyOutcome::Disagree(table)
    }
}

/// Verify a batch of seeded random instances (mixed WCNF and native).
/// Returns (agreed, total, disagreement table).
pub fn verify_random_batch(count: usize, seed: u64) -> (usize, usize, String) {
    let mut ok = 0;
    let mut table = String::new();
    for i in 0..count {
        let s = seed.wrapping_add(i as u64);
        let p = if i % 5 == 4 {
            let params = gen::CopParams { int_vars: 2, domain: 4, ..gen::CopParams::default() };
            parse_native(&gen::random_cop_text(&params, s)).unwrap()
        } else {
            let params = gen::RandomParams {
                vars: 4 + (i % 5),
                soft_clauses: 6 + (i % 10),
                hard_clauses: i % 4,
                ..gen::RandomParams::default()
            };
            parse_wcnf(&gen::random_wcnf_text(&params, s)).unwrap()
        };
        match verify_instance(&p, s) {
            VerifyOutcome::Agree(_) => ok += 1,
            VerifyOutcome::Disagree(t) => {
                let _ = writeln!(table, "instance {i} (seed {s}):\n{t}");
            }
            VerifyOutcome::CapExceeded => {
                let _ = writeln!(table, "instance {i}: oracle cap exceeded");
            }
        }
    }
    (ok, count, table)
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub variant: String,
    pub status: String,
    pub cost: Option<u64>,
    pub first_incumbent_cost: Option<u64>,
    pub conflicts_to_first_incumbent: Option<u64>,
    pub conflicts: u64,
    pub decisions: u64,
    pub cores_found: u64,
    pub root_lower_bound: u64,
    pub time_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantAggregate {
    pub variant: String,
    pub optima: usize,
    pub solutions: usize,
    pub mean_time_ms: f64,
    pub mean_objective: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct RunReport {
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<VariantAggregate>,
}

impl RunReport {
    /// Tab-separated report: one row per (instance, variant) plus
    /// `# aggregate` footer lines.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from(
            "instance\tvariant\tstatus\tcost\tfirst_cost\tconflicts_to_first\tconflicts\tdecisions\tcores\troot_lb\ttime_ms\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.instance,
                r.variant,
                r.status,
                opt_str(r.cost),
                opt_str(r.first_incumbent_cost),
                opt_str(r.conflicts_to_first_incumbent),
                r.conflicts,
                r.decisions,
                r.cores_found,
                r.root_lower_bound,
                r.time_ms
            );
        }
        for a in &self.aggregates {
            let _ = writeln!(
                s,
                "# aggregate\t{}\topt={}\tsol={}\tmean_time_ms={:.1}\tmean_obj={}",
                a.variant,
                a.optima,
                a.solutions,
                a.mean_time_ms,
                a.mean_objective.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into())
            );
        }
        s
    }
}

fn opt_str<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

/// Run the configured variants over a set of named instance texts.
pub fn bench_texts(
    instances: &[(String, String)],
    variants: &[(Mode, Bounding)],
    time_limit: Option<f64>,
    seed: u64,
) -> RunReport {
    let mut report = RunReport::default();
    for (name, text) in instances {
        let p = match parse_instance(text, Format::Auto, name) {
            Ok(p) => p,
            Err(e) => {
                report.rows.push(BenchRow {
                    instance: name.clone(),
                    variant: "-".into(),
                    status: format!("unreadable: {e}"),
                    cost: None,
                    first_incumbent_cost: None,
                    conflicts_to_first_incumbent: None,
                    conflicts: 0,
                    decisions: 0,
                    cores_found: 0,
                    root_lower_bound: 0,
                    time_ms: 0,
                });
                continue;
            }
        };
        for &(mode, bounding) in variants {
            let cfg = SolverConfig { mode, bounding, time_limit, seed, ..SolverConfig::default() };
            let t0 = Instant::now();
            let (outcome, stats, _) = solve(&p, &cfg);
            let (status, cost) = match &outcome {
                Outcome::Optimal(i) => ("optimal", Some(i.cost)),
                Outcome::Infeasible => ("unsatisfiable", None),
                Outcome::Bound { incumbent: Some(i), .. } => ("satisfiable", Some(i.cost)),
                Outcome::Bound { incumbent: None, .. } => ("unknown", None),
            };
            report.rows.push(BenchRow {
                instance: name.clone(),
                variant: format!("{}:{}", mode_name(mode), bounding_name(bounding)),
                status: status.into(),
                cost,
                first_incumbent_cost: stats.first_incumbent_cost,
                conflicts_to_first_incumbent: stats.conflicts_to_first_incumbent,
                conflicts: stats.conflicts,
                decisions: stats.decisions,
                cores_found: stats.cores_found,
                root_lower_bound: stats.root_lower_bound,
                time_ms: t0.elapsed().as_millis() as u64,
            });
        }
    }
    for &(mode, bounding) in variants {
        let vname = format!("{}:{}", mode_name(mode), bounding_name(bounding));
        let rows: Vec<&BenchRow> = report.rows.iter().filter(|r| r.variant == vname).collect();
        if rows.is_empty() {
            continue;
        }
        let optima = rows.iter().filter(|r| r.status == "optimal").count();
        let solutions = rows.iter().filter(|r| r.cost.is_some()).count();
        let mean_time_ms = rows.iter().map(|r| r.time_ms as f64).sum::<f64>() / rows.len() as f64;
        let costs: Vec<f64> = rows.iter().filter_map(|r| r.cost.map(|c| c as f64)).collect();
        let mean_objective = if costs.is_empty() {
            None
        } else {
            Some(costs.iter().sum::<f64>() / costs.len() as f64)
        };
        report.aggregates.push(VariantAggregate {
            variant: vname,
            optima,
            solutions,
            mean_time_ms,
            mean_objective,
        });
    }
    report
}

/// Read every regular file in a directory (sorted by name) for `bench`.
pub fn read_instance_dir(dir: &Path) -> std::io::Result<Vec<(String, String)>> {
    let mut names: Vec<std::path::PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    names.sort();
    let mut out = Vec::new();
    for p in names {
        match std::fs::read_to_string(&p) {
            Ok(text) => out.push((p.display().to_string(), text)),
            Err(_) => out.push((p.display().to_string(), String::new())),
        }
    }
    Ok(out)
}

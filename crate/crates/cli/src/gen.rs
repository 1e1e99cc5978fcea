//! Seeded instance generators for benchmarking and verification batches.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomParams {
    pub vars: usize,
    pub soft_clauses: usize,
    pub hard_clauses: usize,
    pub width: usize,
    pub weight_max: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { vars: 10, soft_clauses: 20, hard_clauses: 4, width: 3, weight_max: 8 }
    }
}

fn clause_lits(rng: &mut ChaCha8Rng, nvars: usize, width: usize) -> Vec<i64> {
    let w = rng.gen_range(1..=width);
    let mut lits: Vec<i64> = Vec::new();
    for _ in 0..w {
        let v = rng.gen_range(1..=nvars) as i64;
        let l = if rng.gen_bool(0.5) { v } else { -v };
        if !lits.contains(&l) && !lits.contains(&-l) {
            lits.push(l);
        }
    }
    if lits.is_empty() {
        lits.push(1);
    }
    lits
}

/// Random weighted partial MAXSAT instance in WCNF.
pub fn random_wcnf_text(p: &RandomParams, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses: Vec<(u64, Vec<i64>)> = Vec::new();
    let top: u64 = p.weight_max * p.soft_clauses as u64 + 1;
    for _ in 0..p.hard_clauses {
        clauses.push((top, clause_lits(&mut rng, p.vars, p.width)));
    }
    for _ in 0..p.soft_clauses {
        let w = rng.gen_range(1..=p.weight_max);
        clauses.push((w, clause_lits(&mut rng, p.vars, p.width)));
    }
    let mut out = format!("p wcnf {} {} {}\n", p.vars, clauses.len(), top);
    for (w, lits) in clauses {
        out.push_str(&w.to_string());
        for l in lits {
            out.push_str(&format!(" {l}"));
        }
        out.push_str(" 0\n");
    }
    out
}

#[derive(Debug, Clone)]
pub struct CopParams {
    pub int_vars: usize,
    pub bool_vars: usize,
    pub domain: i64,
    pub soft_constraints: usize,
    pub hard_constraints: usize,
    pub weight_max: u64,
}

impl Default for CopParams {
    fn default() -> Self {
        CopParams {
            int_vars: 3,
            bool_vars: 2,
            domain: 6,
            soft_constraints: 5,
            hard_constraints: 3,
            weight_max: 6,
        }
    }
}

/// Random constraint-optimization instance with integer variables, in the
/// native format.
pub fn random_cop_text(p: &CopParams, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let mut domains = Vec::new();
    for i in 0..p.int_vars {
        let lo = rng.gen_range(-2..=1);
        let width = rng.gen_range(1..=p.domain.max(1));
        let hi = lo + width - 1;
        domains.push((lo, hi));
        out.push_str(&format!("int i{i} {lo} {hi}\n"));
    }
    for b in 0..p.bool_vars {
        out.push_str(&format!("bool b{b}\n"));
    }
    let linear = |rng: &mut ChaCha8Rng| -> String {
        let nterms = rng.gen_range(1..=p.int_vars.min(3));
        let mut used = Vec::new();
        let mut s = String::from("linear ");
        for _ in 0..nterms {
            let v = rng.gen_range(0..p.int_vars);
            if used.contains(&v) {
                continue;
            }
            used.push(v);
            let c: i64 = *[-3, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap();
            if !s.ends_with("linear ") {
                s.push_str(" + ");
            }
            s.push_str(&format!("{c}*i{v}"));
        }
        if s.ends_with("linear ") {
            s.push_str("1*i0");
        }
        let rel = ["<=", ">=", "="][rng.gen_range(0..3)];
        let bound = rng.gen_range(-6..=10);
        s.push_str(&format!(" {rel} {bound}"));
        s
    };
    let clause = |rng: &mut ChaCha8Rng| -> String {
        let mut s = String::from("clause");
        let w = rng.gen_range(1..=2.min(p.bool_vars));
        for _ in 0..w {
            let b = rng.gen_range(0..p.bool_vars);
            let neg = if rng.gen_bool(0.5) { "-" } else { "" };
            s.push_str(&format!(" {neg}b{b}"));
        }
        s
    };
    for _ in 0..p.hard_constraints {
        // equalities as hard constraints make too many instances infeasible
        let stmt = if rng.gen_bool(0.6) && p.int_vars > 0 {
            let mut s = linear(&mut rng);
            while s.contains(" = ") {
                s = linear(&mut rng);
            }
            s
        } else if p.bool_vars > 0 {
            clause(&mut rng)
        } else {
            linear(&mut rng)
        };
        out.push_str(&stmt);
        out.push('\n');
    }
    for _ in 0..p.soft_constraints {
        let w = rng.gen_range(1..=p.weight_max);
        let stmt = if rng.gen_bool(0.6) && p.int_vars > 0 {
            linear(&mut rng)
        } else if p.bool_vars > 0 {
            clause(&mut rng)
        } else {
            linear(&mut rng)
        };
        out.push_str(&format!("soft {w} {stmt}\n"));
    }
    out
}

#[derive(Debug, Clone)]
pub struct PlantedParams {
    pub vars: usize,
    pub soft_clauses: usize,
    /// Soft constraints the planted optimum must violate.
    pub violations: usize,
    pub hard_clauses: usize,
}

impl Default for PlantedParams {
    fn default() -> Self {
        PlantedParams { vars: 30, soft_clauses: 60, violations: 2, hard_clauses: 25 }
    }
}

/// Mostly-satisfiable family: a planted assignment satisfies every hard
/// clause and all but `violations` of the unit-weight soft clauses; the
/// violated ones are forced by hard clauses, so the optimum cost is exactly
/// `violations`.
pub fn planted_wcnf_text(p: &PlantedParams, seed: u64) -> String {
    assert!(p.vars >= p.violations + 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut planted: Vec<bool> = (0..p.vars).map(|_| rng.gen_bool(0.5)).collect();
    let top = p.soft_clauses as u64 + 1;
    let mut clauses: Vec<(u64, Vec<i64>)> = Vec::new();
    // clash variables: hard clauses force v false while a soft asks for it
    let mut clash: Vec<usize> = Vec::new();
    while clash.len() < p.violations {
        let v = rng.gen_range(0..p.vars);
        if !clash.contains(&v) {
            clash.push(v);
        }
    }
    for &v in &clash {
        planted[v] = false;
        let mut w = rng.gen_range(0..p.vars);
        while w == v {
            w = rng.gen_range(0..p.vars);
        }
        let vl = (v + 1) as i64;
        let wl = (w + 1) as i64;
        clauses.push((top, vec![-vl, wl]));
        clauses.push((top, vec![-vl, -wl]));
        clauses.push((1, vec![vl]));
    }
    // hard clauses satisfied by the planted assignment
    for _ in 0..p.hard_clauses {
        let mut lits: Vec<i64> = Vec::new();
        for _ in 0..3 {
            let v = rng.gen_range(0..p.vars);
            let l = (v + 1) as i64;
            let l = if rng.gen_bool(0.5) { l } else { -l };
            if !lits.contains(&l) && !lits.contains(&-l) {
                lits.push(l);
            }
        }
        let sat = lits.iter().any(|&l| {
            let v = (l.unsigned_abs() - 1) as usize;
            (l > 0) == planted[v]
        });
        if !sat {
            // flip one literal to match the planted value
            let k = rng.gen_range(0..lits.len());
            lits[k] = -lits[k];
        }
        clauses.push((top, lits));
    }
    // remaining softs are unit literals true under the planted assignment
    while clauses.iter().filter(|(w, _)| *w < top).count() < p.soft_clauses {
        let v = rng.gen_range(0..p.vars);
        if clash.contains(&v) {
            continue;
        }
        let l = (v + 1) as i64;
        clauses.push((1, vec![if planted[v] { l } else { -l }]));
    }
    let mut out = format!("p wcnf {} {} {}\n", p.vars, clauses.len(), top);
    for (w, lits) in clauses {
        out.push_str(&w.to_string());
        for l in lits {
            out.push_str(&format!(" {l}"));
        }
        out.push_str(" 0\n");
    }
    out
}

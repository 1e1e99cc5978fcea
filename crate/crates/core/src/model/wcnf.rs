//! DIMACS WCNF (classic format with a `top` weight) reader and writer.

use super::{reify_soft, BLit, Constraint, ParseError, Problem, SoftSpec, VarDecl, VarKind};

/// Parse classic weighted CNF: header `p wcnf <nvars> <nclauses> <top>`,
/// clause lines `<weight> <lit>* 0`. Weight equal to `top` marks a hard
/// clause. Comment lines start with `c`.
pub fn parse_wcnf(text: &str) -> Result<Problem, ParseError> {
    let mut header: Option<(usize, u64)> = None; // (nvars, top)
    let mut hard: Vec<Constraint> = Vec::new();
    let mut softs: Vec<SoftSpec> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            let toks: Vec<&str> = trimmed.split_whitespace().collect();
            if toks.len() != 5 || toks[0] != "p" || toks[1] != "wcnf" {
                return Err(ParseError::MalformedHeader {
                    line,
                    detail: format!("expected `p wcnf <nvars> <nclauses> <top>`, got `{trimmed}`"),
                });
            }
            let nvars: usize = toks[2].parse().map_err(|_| ParseError::MalformedHeader {
                line,
                detail: format!("bad variable count `{}`", toks[2]),
            })?;
            let _nclauses: usize = toks[3].parse().map_err(|_| ParseError::MalformedHeader {
                line,
                detail: format!("bad clause count `{}`", toks[3]),
            })?;
            let top: u64 = toks[4].parse().map_err(|_| ParseError::MalformedHeader {
                line,
                detail: format!("bad top weight `{}`", toks[4]),
            })?;
            header = Some((nvars, top));
            continue;
        }
        let (nvars, top) = header.ok_or(ParseError::MalformedHeader {
            line,
            detail: "clause before header".to_string(),
        })?;
        let mut toks = trimmed.split_whitespace();
        let wtok = toks.next().unwrap();
        let weight: i64 = wtok.parse().map_err(|_| ParseError::MalformedStatement {
            line,
            detail: format!("bad weight `{wtok}`"),
        })?;
        if weight <= 0 {
            return Err(ParseError::NonPositiveWeight { line });
        }
        let weight = weight as u64;
        if weight > top {
            return Err(ParseError::WeightAboveTop { line, weight, top });
        }
        let mut lits: Vec<BLit> = Vec::new();
        let mut terminated = false;
        for t in toks {
            let l: i64 = t.parse().map_err(|_| ParseError::MalformedStatement {
                line,
                detail: format!("bad literal `{t}`"),
            })?;
            if l == 0 {
                terminated = true;
                break;
            }
            if l.unsigned_abs() as usize > nvars {
                return Err(ParseError::LiteralOutOfRange { line, lit: l, max: nvars });
            }
            lits.push(BLit { var: (l.unsigned_abs() - 1) as usize, positive: l > 0 });
        }
        if !terminated {
            return Err(ParseError::MalformedStatement {
                line,
                detail: "clause not terminated by 0".to_string(),
            });
        }
        if lits.is_empty() {
            return Err(ParseError::EmptyClause { line });
        }
        if weight == top {
            hard.push(Constraint::Clause(lits));
        } else {
            softs.push(SoftSpec { inner: Constraint::Clause(lits), weight });
        }
    }
    let (nvars, _) = header.ok_or(ParseError::MalformedHeader {
        line: text.lines().count().max(1),
        detail: "missing header".to_string(),
    })?;
    let vars: Vec<VarDecl> = (1..=nvars)
        .map(|i| VarDecl { name: i.to_string(), lo: 0, hi: 1, kind: VarKind::Bool })
        .collect();
    reify_soft(vars, hard, softs).map_err(|_| ParseError::WeightOverflow)
}

fn lit_to_dimacs(l: &BLit) -> i64 {
    let v = (l.var + 1) as i64;
    if l.positive {
        v
    } else {
        -v
    }
}

/// Write a problem back out as classic WCNF. Only valid for problems whose
/// hard constraints and softs are clauses over the user variables.
pub fn serialize_wcnf(p: &Problem) -> String {
    let nvars = p.vars.iter().filter(|d| !matches!(d.kind, VarKind::Relax(_))).count();
    let top: u64 = p.softs.iter().map(|s| s.weight).sum::<u64>() + 1;
    let mut out = String::new();
    let mut body = String::new();
    let mut nclauses = 0usize;
    // hard clauses: skip the reified guards (they carry a relax var)
    for c in &p.hard {
        if let Constraint::Clause(lits) = c {
            if lits.iter().any(|l| matches!(p.vars[l.var].kind, VarKind::Relax(_))) {
                continue;
            }
            body.push_str(&top.to_string());
            for l in lits {
                body.push(' ');
                body.push_str(&lit_to_dimacs(l).to_string());
            }
            body.push_str(" 0\n");
            nclauses += 1;
        }
    }
    for s in &p.softs {
        if let Constraint::Clause(lits) = &s.inner {
            body.push_str(&s.weight.to_string());
            for l in lits {
                body.push(' ');
                body.push_str(&lit_to_dimacs(l).to_string());
            }
            body.push_str(" 0\n");
            nclauses += 1;
        }
    }
    out.push_str(&format!("p wcnf {nvars} {nclauses} {top}\n"));
    out.push_str(&body);
    out
}

//! Native COP text format.
//!
//! One statement per line (`;` also separates statements), `#` starts a
//! comment. Statements:
//!
//! ```text
//! int <name> <lo> <hi>
//! bool <name>
//! clause <±name>+
//! linear <coef>*<name> (+ <coef>*<name>)* <=|>=|= <int>
//! soft <weight> <clause-or-linear statement>
//! ```
//!
//! The `<coef>*` part is optional and defaults to 1.

use std::collections::HashMap;

use super::{
    reify_soft, BLit, Constraint, LinRel, ParseError, Problem, SoftSpec, VarDecl, VarKind,
};

pub fn parse_native(text: &str) -> Result<Problem, ParseError> {
    let mut vars: Vec<VarDecl> = Vec::new();
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut hard: Vec<Constraint> = Vec::new();
    let mut softs: Vec<SoftSpec> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let uncommented = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        for stmt in uncommented.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            parse_statement(stmt, line, &mut vars, &mut names, &mut hard, &mut softs)?;
        }
    }
    reify_soft(vars, hard, softs).map_err(|_| ParseError::WeightOverflow)
}

fn parse_statement(
    stmt: &str,
    line: usize,
    vars: &mut Vec<VarDecl>,
    names: &mut HashMap<String, usize>,
    hard: &mut Vec<Constraint>,
    softs: &mut Vec<SoftSpec>,
) -> Result<(), ParseError> {
    let toks: Vec<&str> = stmt.split_whitespace().collect();
    match toks[0] {
        "int" => {
            if toks.len() != 4 {
                return Err(ParseError::MalformedStatement {
                    line,
                    detail: "expected `int <name> <lo> <hi>`".into(),
                });
            }
            let name = toks[1].to_string();
            let lo: i64 = toks[2].parse().map_err(|_| ParseError::MalformedStatement {
                line,
                detail: format!("bad bound `{}`", toks[2]),
            })?;
            let hi: i64 = toks[3].parse().map_err(|_| ParseError::MalformedStatement {
                line,
                detail: format!("bad bound `{}`", toks[3]),
            })?;
            if lo > hi {
                return Err(ParseError::EmptyDomain { line, name });
            }
            if names.contains_key(&name) {
                return Err(ParseError::DuplicateVariable { line, name });
            }
            names.insert(name.clone(), vars.len());
            vars.push(VarDecl { name, lo, hi, kind: VarKind::Int });
            Ok(())
        }
        "bool" => {
            if toks.len() != 2 {
                return Err(ParseError::MalformedStatement {
                    line,
                    detail: "expected `bool <name>`".into(),
                });
            }
            let name = toks[1].to_string();
            if names.contains_key(&name) {
                return Err(ParseError::DuplicateVariable { line, name });
            }
            names.insert(name.clone(), vars.len());
            vars.push(VarDecl { name, lo: 0, hi: 1, kind: VarKind::Bool });
            Ok(())
        }
        "clause" => {
            let c = parse_clause(&toks[1..], line, vars, names)?;
            hard.push(c);
            Ok(())
        }
        "linear" => {
            let c = parse_linear(&toks[1..], line, names)?;
            hard.push(c);
            Ok(())
        }
        "soft" => {
            if toks.len() < 3 {
                return Err(ParseError::MalformedStatement {
                    line,
                    detail: "expected `soft <weight> <constraint>`".into(),
                });
            }
            let weight: i64 = toks[1].parse().map_err(|_| ParseError::MalformedStatement {
                line,
                detail: format!("bad weight `{}`", toks[1]),
            })?;
            if weight <= 0 {
                return Err(ParseError::NonPositiveWeight { line });
            }
            let inner = match toks[2] {
                "clause" => parse_clause(&toks[3..], line, vars, names)?,
                "linear" => parse_linear(&toks[3..], line, names)?,
                other => {
                    return Err(ParseError::MalformedStatement {
                        line,
                        detail: format!("soft prefix must guard clause/linear, got `{other}`"),
                    })
                }
            };
            softs.push(SoftSpec { inner, weight: weight as u64 });
            Ok(())
        }
        other => Err(ParseError::MalformedStatement {
            line,
            detail: format!("unknown statement `{other}`"),
        }),
    }
}

fn parse_clause(
    toks: &[&str],
    line: usize,
    vars: &[VarDecl],
    names: &HashMap<String, usize>,
) -> Result<Constraint, ParseError> {
    if toks.is_empty() {
        return Err(ParseError::EmptyClause { line });
    }
    let mut lits = Vec::new();
    for t in toks {
        let (positive, name) = match t.strip_prefix('-') {
            Some(rest) => (false, rest),
            None => (true, *t),
        };
        let &var = names.get(name).ok_or_else(|| ParseError::UndeclaredVariable {
            line,
            name: name.to_string(),
        })?;
        if vars[var].lo != 0 || vars[var].hi != 1 {
            return Err(ParseError::MalformedStatement {
                line,
                detail: format!("clause literal over non-Boolean variable `{name}`"),
            });
        }
        lits.push(BLit { var, positive });
    }
    Ok(Constraint::Clause(lits))
}

fn parse_linear(
    toks: &[&str],
    line: usize,
    names: &HashMap<String, usize>,
) -> Result<Constraint, ParseError> {
    // terms separated by `+`, then relation, then bound
    let rel_pos = toks
        .iter()
        .position(|t| matches!(*t, "<=" | ">=" | "="))
        .ok_or_else(|| ParseError::MalformedStatement {
            line,
            detail: "linear constraint missing relation".into(),
        })?;
    if rel_pos + 2 != toks.len() {
        return Err(ParseError::MalformedStatement {
            line,
            detail: "expected single integer bound after relation".into(),
        });
    }
    let rel = match toks[rel_pos] {
        "<=" => LinRel::Le,
        ">=" => LinRel::Ge,
        _ => LinRel::Eq,
    };
    let bound: i64 = toks[rel_pos + 1].parse().map_err(|_| ParseError::MalformedStatement {
        line,
        detail: format!("bad bound `{}`", toks[rel_pos + 1]),
    })?;
    let mut terms = Vec::new();
    for part in toks[..rel_pos].split(|t| *t == "+") {
        if part.len() != 1 {
            return Err(ParseError::MalformedStatement {
                line,
                detail: "expected `+`-separated terms".into(),
            });
        }
        let t = part[0];
        let (coef, name) = match t.split_once('*') {
            Some((c, n)) => {
                let coef: i64 = c.parse().map_err(|_| ParseError::NonIntegerCoefficient {
                    line,
                    token: c.to_string(),
                })?;
                (coef, n)
            }
            None => (1, t),
        };
        let &var = names.get(name).ok_or_else(|| ParseError::UndeclaredVariable {
            line,
            name: name.to_string(),
        })?;
        if coef == 0 {
            continue;
        }
        terms.push((coef, var));
    }
    Ok(Constraint::Linear { terms, rel, bound })
}

/// Serialize a problem back to native statements, one per line.
pub fn serialize_native(p: &Problem) -> String {
    let mut out = String::new();
    for d in &p.vars {
        match d.kind {
            VarKind::Int => out.push_str(&format!("int {} {} {}\n", d.name, d.lo, d.hi)),
            VarKind::Bool => out.push_str(&format!("bool {}\n", d.name)),
            VarKind::Relax(_) => {}
        }
    }
    for c in &p.hard {
        if constraint_mentions_relax(p, c) {
            continue;
        }
        out.push_str(&format_constraint(p, c));
        out.push('\n');
    }
    for s in &p.softs {
        out.push_str(&format!("soft {} {}", s.weight, format_constraint(p, &s.inner)));
        out.push('\n');
    }
    out
}

fn constraint_mentions_relax(p: &Problem, c: &Constraint) -> bool {
    match c {
        Constraint::Clause(lits) => {
            lits.iter().any(|l| matches!(p.vars[l.var].kind, VarKind::Relax(_)))
        }
        Constraint::Linear { terms, .. } => {
            terms.iter().any(|&(_, v)| matches!(p.vars[v].kind, VarKind::Relax(_)))
        }
        Constraint::HalfReified { guard, inner } => {
            matches!(p.vars[guard.var].kind, VarKind::Relax(_))
                || constraint_mentions_relax(p, inner)
        }
    }
}

fn format_constraint(p: &Problem, c: &Constraint) -> String {
    match c {
        Constraint::Clause(lits) => {
            let mut s = String::from("clause");
            for l in lits {
                s.push(' ');
                if !l.positive {
                    s.push('-');
                }
                s.push_str(&p.vars[l.var].name);
            }
            s
        }
        Constraint::Linear { terms, rel, bound } => {
            let mut s = String::from("linear ");
            for (i, (c, v)) in terms.iter().enumerate() {
                if i > 0 {
                    s.push_str(" + ");
                }
                s.push_str(&format!("{}*{}", c, p.vars[*v].name));
            }
            let r = match rel {
                LinRel::Le => "<=",
                LinRel::Ge => ">=",
                LinRel::Eq => "=",
            };
            s.push_str(&format!(" {r} {bound}"));
            s
        }
        Constraint::HalfReified { .. } => unreachable!("half-reified constraints are internal"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{brute_force_optimum, OracleOutcome, DEFAULT_SPACE_CAP};

    #[test]
    fn soft_linear_with_forcing_hard_constraint() {
        let p = parse_native("int x 1 3; soft 2 linear x <= 1; linear x >= 2").unwrap();
        assert_eq!(p.softs.len(), 1);
        assert_eq!(p.softs[0].weight, 2);
        match brute_force_optimum(&p, DEFAULT_SPACE_CAP).unwrap() {
            OracleOutcome::Optimal { cost, .. } => assert_eq!(cost, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hard_only_file_has_empty_objective() {
        let p = parse_native("bool a\nbool b\nclause a b\n").unwrap();
        assert!(p.objective.is_empty());
        match brute_force_optimum(&p, DEFAULT_SPACE_CAP).unwrap() {
            OracleOutcome::Optimal { cost, .. } => assert_eq!(cost, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nesting_instance_native() {
        // hard clauses a|b|d, b|c|!d, !a|d with softs !a, !b, !c; the true
        // optimum violates a single soft (b=true satisfies everything).
        let text = "bool a\nbool b\nbool c\nbool d\n\
clause a b d\nclause b c -d\nclause -a d\n\
soft 1 clause -a\nsoft 1 clause -b\nsoft 1 clause -c\n";
        let p = parse_native(text).unwrap();
        assert_eq!(p.softs.len(), 3);
        match brute_force_optimum(&p, DEFAULT_SPACE_CAP).unwrap() {
            OracleOutcome::Optimal { cost, .. } => assert_eq!(cost, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_cases() {
        assert_eq!(
            parse_native("clause a"),
            Err(ParseError::UndeclaredVariable { line: 1, name: "a".into() })
        );
        assert_eq!(
            parse_native("int x 1 3\nlinear 1.5*x <= 2"),
            Err(ParseError::NonIntegerCoefficient { line: 2, token: "1.5".into() })
        );
        assert_eq!(
            parse_native("int x 3 1"),
            Err(ParseError::EmptyDomain { line: 1, name: "x".into() })
        );
        assert_eq!(
            parse_native("bool a\nbool a"),
            Err(ParseError::DuplicateVariable { line: 2, name: "a".into() })
        );
    }

    #[test]
    fn round_trip_is_identity() {
        let text = "int x 0 5\nbool a\nbool b\n\
clause a -b\nlinear 2*x + -1*x <= 4\n\
soft 3 clause b\nsoft 1 linear 1*x >= 2\n";
        let p1 = parse_native(text).unwrap();
        let p2 = parse_native(&serialize_native(&p1)).unwrap();
        assert_eq!(p1, p2);
    }
}

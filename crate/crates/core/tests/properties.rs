//! Property tests for the store, the parsers and the strengthening
//! machinery.

use proptest::prelude::*;

use coropt_core::bounding::disjoint_strengthen;
use coropt_core::domains::{AssignResult, DomainStore, Lit, LitKind, Reason};
use coropt_core::model::{parse_native, parse_wcnf, serialize_native, serialize_wcnf};
use coropt_core::VarId;

fn arb_lit(num_vars: u32, width: i64) -> impl Strategy<Value = Lit> {
    (0..num_vars, 0..4u8, 0..width).prop_map(|(v, k, val)| {
        let var = VarId(v);
        match k {
            0 => Lit::eq(var, val),
            1 => Lit::neq(var, val),
            2 => Lit::geq(var, val),
            _ => Lit::leq(var, val),
        }
    })
}

proptest! {
    #[test]
    fn negation_is_an_involution(l in arb_lit(8, 20)) {
        prop_assert_eq!(l.negate().negate(), l);
        prop_assert_ne!(l.negate(), l);
    }

    #[test]
    fn backjump_restores_domain_snapshots(
        lits in prop::collection::vec(arb_lit(4, 8), 1..24),
        at in 1usize..20,
    ) {
        let mut store = DomainStore::new();
        for _ in 0..4 {
            store.new_var(0, 7);
        }
        // root segment, then one level of extra assignments
        let mut snapshots = Vec::new();
        let mut opened = false;
        for (i, l) in lits.iter().enumerate() {
            if i == at.min(lits.len() - 1) && !opened {
                snapshots = (0..4).map(|v| store.domain_snapshot(VarId(v))).collect();
                store.push_level();
                opened = true;
            }
            let _ = store.assign(*l, Reason::Decision);
        }
        if opened {
            store.backjump(0);
            let now: Vec<_> = (0..4).map(|v| store.domain_snapshot(VarId(v))).collect();
            prop_assert_eq!(snapshots, now);
        }
    }

    #[test]
    fn assigned_literals_report_consistent_truth(
        lits in prop::collection::vec(arb_lit(3, 6), 1..16),
    ) {
        // a literal and its negation never both hold
        let mut store = DomainStore::new();
        for _ in 0..3 {
            store.new_var(0, 5);
        }
        for l in lits {
            let _ = store.assign(l, Reason::Decision);
            if store.is_true(l) {
                prop_assert!(!store.is_true(l.negate()));
            }
        }
        for v in 0..3u32 {
            let var = VarId(v);
            for val in 0..6 {
                for kind in [LitKind::Eq, LitKind::Neq, LitKind::Geq, LitKind::Leq] {
                    let l = Lit { var, kind, value: val };
                    if store.is_true(l) {
                        prop_assert!(!store.is_true(l.negate()));
                    }
                }
            }
        }
    }

    #[test]
    fn trail_replay_reproduces_identical_trail(
        lits in prop::collection::vec(arb_lit(4, 8), 1..20),
    ) {
        let run = |lits: &[Lit]| -> Vec<(Lit, u32)> {
            let mut store = DomainStore::new();
            for _ in 0..4 {
                store.new_var(0, 7);
            }
            for l in lits {
                store.push_level();
                match store.assign(*l, Reason::Decision) {
                    AssignResult::Ok | AssignResult::AlreadyTrue => {}
                    AssignResult::Conflict(_) => break,
                }
            }
            store.trail.iter().map(|e| (e.lit, e.level)).collect()
        };
        prop_assert_eq!(run(&lits), run(&lits));
    }

    #[test]
    fn wcnf_round_trip(
        nvars in 1usize..6,
        clauses in prop::collection::vec(
            (1u64..9, prop::collection::vec((1i64..6, prop::bool::ANY), 1..4)),
            1..8,
        ),
        hard_mask in prop::collection::vec(prop::bool::ANY, 8),
    ) {
        let top: u64 = clauses.iter().map(|(w, _)| *w).sum::<u64>() + 1;
        let mut text = format!("p wcnf {} {} {}\n", nvars, clauses.len(), top);
        for (i, (w, lits)) in clauses.iter().enumerate() {
            let weight = if hard_mask[i % 8] { top } else { *w };
            text.push_str(&weight.to_string());
            for (v, pos) in lits {
                let v = ((v - 1) % nvars as i64) + 1;
                text.push_str(&format!(" {}", if *pos { v } else { -v }));
            }
            text.push_str(" 0\n");
        }
        let p1 = parse_wcnf(&text).unwrap();
        let p2 = parse_wcnf(&serialize_wcnf(&p1)).unwrap();
        prop_assert_eq!(p1, p2);
    }

    #[test]
    fn native_round_trip(
        ints in prop::collection::vec((0i64..4, 4i64..9), 0..3),
        nbools in 1usize..4,
        clauses in prop::collection::vec(
            prop::collection::vec((0usize..3, prop::bool::ANY), 1..4),
            0..4,
        ),
        linears in prop::collection::vec(
            (prop::collection::vec((-3i64..4, 0usize..3), 1..3), 0u8..3, -5i64..9),
            0..4,
        ),
        soft_weights in prop::collection::vec(prop::option::of(1u64..9), 8),
    ) {
        let mut text = String::new();
        for (i, (lo, hi)) in ints.iter().enumerate() {
            text.push_str(&format!("int i{i} {lo} {hi}\n"));
        }
        for b in 0..nbools {
            text.push_str(&format!("bool b{b}\n"));
        }
        let mut stmt_idx = 0;
        for lits in &clauses {
            let mut s = String::from("clause");
            for (v, pos) in lits {
                s.push_str(&format!(" {}{}", if *pos { "" } else { "-" }, format!("b{}", v % nbools)));
            }
            match soft_weights[stmt_idx % 8] {
                Some(w) => text.push_str(&format!("soft {w} {s}\n")),
                None => text.push_str(&format!("{s}\n")),
            }
            stmt_idx += 1;
        }
        for (terms, rel, bound) in &linears {
            if ints.is_empty() {
                break;
            }
            let mut s = String::from("linear ");
            for (k, (c, v)) in terms.iter().enumerate() {
                if *c == 0 {
                    continue;
                }
                if k > 0 && !s.ends_with("linear ") {
                    s.push_str(" + ");
                }
                s.push_str(&format!("{}*i{}", c, v % ints.len()));
            }
            if s.ends_with("linear ") {
                continue;
            }
            let r = match rel % 3 { 0 => "<=", 1 => ">=", _ => "=" };
            s.push_str(&format!(" {r} {bound}"));
            match soft_weights[stmt_idx % 8] {
                Some(w) => text.push_str(&format!("soft {w} {s}\n")),
                None => text.push_str(&format!("{s}\n")),
            }
            stmt_idx += 1;
        }
        let p1 = parse_native(&text).unwrap();
        let p2 = parse_native(&serialize_native(&p1)).unwrap();
        prop_assert_eq!(p1, p2);
    }

    #[test]
    fn disjoint_bound_drops_by_alpha_sum_and_stays_nonnegative(
        weights in prop::collection::vec(1u64..12, 2..8),
        cores in prop::collection::vec(prop::collection::vec(0usize..8, 2..5), 0..6),
        upper in 1u64..40,
    ) {
        let n = weights.len();
        let base: Vec<(VarId, u64)> =
            weights.iter().enumerate().map(|(i, &w)| (VarId(i as u32), w)).collect();
        let cores: Vec<Vec<VarId>> = cores
            .iter()
            .map(|c| {
                let mut m: Vec<VarId> = c.iter().map(|&i| VarId((i % n) as u32)).collect();
                m.sort();
                m.dedup();
                m
            })
            .filter(|m| m.len() >= 2)
            .collect();
        let (coeffs, rhs, alphas) = disjoint_strengthen(&base, upper, &cores);
        let alpha_sum: u64 = alphas.iter().sum();
        prop_assert_eq!(rhs, upper as i128 - alpha_sum as i128);
        // working coefficients never grow (and u64 keeps them non-negative)
        for (v, c) in coeffs {
            prop_assert!(c <= weights[v.index()]);
        }
    }
}

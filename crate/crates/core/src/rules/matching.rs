//! One-way matching of formulas and sequents.

use std::collections::BTreeSet;

use crate::syntax::{Formula, Sequent, Substitution, Term, Var};

/// Extends `th` so that `p[th] = t`, binding only variables in `vars`.
pub fn match_term(p: &Term, t: &Term, vars: &BTreeSet<Var>, th: &mut Substitution) -> bool {
    match p {
        Term::Var(v) if vars.contains(v) => match th.get(v) {
            Some(bound) => bound == t,
            None => {
                th.insert(v.clone(), t.clone());
                true
            }
        },
        Term::Var(_) => p == t,
        Term::App(f, ps) => match t {
            Term::App(g, ts) if f == g && ps.len() == ts.len() => ps.iter().zip(ts).all(|(a, b)| match_term(a, b, vars, th)),
            _ => false,
        },
    }
}

pub fn match_formula(p: &Formula, f: &Formula, vars: &BTreeSet<Var>, th: &mut Substitution) -> bool {
    match (p, f) {
        (Formula::Eq(a, b), Formula::Eq(c, d)) => match_term(a, c, vars, th) && match_term(b, d, vars, th),
        (Formula::Pred(p, xs), Formula::Pred(q, ys)) if p == q && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(a, b)| match_term(a, b, vars, th))
        }
        (Formula::Not(a), Formula::Not(b)) => match_formula(a, b, vars, th),
        (Formula::And(a, b), Formula::And(c, d)) | (Formula::Or(a, b), Formula::Or(c, d)) | (Formula::Imp(a, b), Formula::Imp(c, d)) => {
            match_formula(a, c, vars, th) && match_formula(b, d, vars, th)
        }
        (Formula::Forall(x, a), Formula::Forall(y, b)) | (Formula::Exists(x, a), Formula::Exists(y, b)) if x == y => {
            let mut inner = vars.clone();
            inner.remove(x);
            match_formula(a, b, &inner, th)
        }
        _ => false,
    }
}

/// All substitutions `th ⊇ seed` (over `vars`) mapping every pattern into
/// `targets`, in a deterministic order.
pub fn match_into(patterns: &[&Formula], targets: &[&Formula], vars: &BTreeSet<Var>, seed: &Substitution) -> Vec<Substitution> {
    let mut out = Vec::new();
    fn go(ps: &[&Formula], ts: &[&Formula], vars: &BTreeSet<Var>, th: &Substitution, out: &mut Vec<Substitution>) {
        let Some((p, rest)) = ps.split_first() else {
            if !out.contains(th) {
                out.push(th.clone());
            }
            return;
        };
        for t in ts {
            let mut th2 = th.clone();
            if match_formula(p, t, vars, &mut th2) {
                go(rest, ts, vars, &th2, out);
            }
        }
    }
    go(patterns, targets, vars, seed, &mut out);
    out
}

/// Substitutions over `FV(pattern)` with `pattern[th] ⊆ target` on both
/// sides, or `=` when `exact`.
pub fn match_sequent(pattern: &Sequent, target: &Sequent, exact: bool) -> Vec<Substitution> {
    let vars = pattern.fv();
    // Atoms with a predicate symbol constrain more than equations.
    fn ordered(side: &BTreeSet<Formula>) -> Vec<&Formula> {
        let mut v: Vec<&Formula> = side.iter().collect();
        v.sort_by_key(|f| matches!(f, Formula::Eq(..)));
        v
    }
    let (pl, pr) = (ordered(&pattern.left), ordered(&pattern.right));
    let tl: Vec<&Formula> = target.left.iter().collect();
    let tr: Vec<&Formula> = target.right.iter().collect();
    let mut out = Vec::new();
    for th in match_into(&pr, &tr, &vars, &Substitution::new()) {
        for th in match_into(&pl, &tl, &vars, &th) {
            if (!exact || th.apply_sequent(pattern) == *target) && !out.contains(&th) {
                out.push(th);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::ADD_DEFS;
    use crate::syntax::{parse_defs, parse_sequent};

    #[test]
    fn sequent_matching() {
        let defs = parse_defs(ADD_DEFS).unwrap();
        let p = parse_sequent("Add1(x1, s(y1), z1) |- Add1(s(x1), y1, z1)", &defs).unwrap();
        let t = parse_sequent("Add1(x2, s(y1), z2) |- Add1(s(x2), y1, z2)", &defs).unwrap();
        let m = match_sequent(&p, &t, true);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].normalized().to_string(), "x1 := x2, z1 := z2");
        let t2 = parse_sequent("x = 0, Add1(x2, s(y1), z2) |- Add1(s(x2), y1, z2)", &defs).unwrap();
        assert!(match_sequent(&p, &t2, true).is_empty());
        assert_eq!(match_sequent(&p, &t2, false).len(), 1);
    }
}
